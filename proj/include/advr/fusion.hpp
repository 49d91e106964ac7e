#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace advr::fusion {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " must be finite");
}

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

// Row-wise softmax with the usual max shift; rows sum to 1 and are invariant
// under a per-row constant added to the logits.
template <typename Derived>
Matrix<typename Derived::Scalar> row_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(logits, "logits");
  Matrix<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Scalar m = logits.row(i).maxCoeff();
    auto shifted = (logits.row(i).array() - m).exp();
    out.row(i) = shifted / shifted.sum();
  }
  return out;
}

template <typename Scalar>
struct AttentionResult {
  Matrix<Scalar> output;
  Matrix<Scalar> weights;  // row-stochastic
};

// rowsoftmax(Q Kᵀ / sqrt(d)) V. Requires matching inner dimensions and at
// least one key; d is the shared feature dimension (columns of Q and K).
template <typename DQ, typename DK, typename DV>
AttentionResult<typename DQ::Scalar> scaled_dot_attention(const Eigen::MatrixBase<DQ>& q,
                                                          const Eigen::MatrixBase<DK>& k,
                                                          const Eigen::MatrixBase<DV>& v) {
  using Scalar = typename DQ::Scalar;
  static_assert(std::is_same_v<Scalar, typename DK::Scalar> &&
                std::is_same_v<Scalar, typename DV::Scalar>);
  detail::require(q.cols() == k.cols(), "query and key feature dimensions must match");
  detail::require(k.rows() == v.rows(), "key and value row counts must match");
  detail::require(k.rows() >= 1, "attention needs at least one key");
  detail::require(q.cols() >= 1, "feature dimension must be positive");
  detail::require_finite(q, "query");
  detail::require_finite(k, "key");
  detail::require_finite(v, "value");
  Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(q.cols()));
  AttentionResult<Scalar> result;
  result.weights = row_softmax((q * k.transpose() * scale).eval());
  result.output = result.weights * v;
  return result;
}

template <typename Scalar>
struct CrossAttentionResult {
  Matrix<Scalar> a_v_to_t;  // clinical queries image: rows follow T
  Matrix<Scalar> a_t_to_v;  // image queries clinical: rows follow V
};

// Each modality alternately serves as query against the other:
// A_{V->T} = Attention(T, V, V) and A_{T->V} = Attention(V, T, T).
template <typename DV, typename DT>
CrossAttentionResult<typename DV::Scalar> bidirectional_cross_attention(
    const Eigen::MatrixBase<DV>& v_feats, const Eigen::MatrixBase<DT>& t_feats) {
  detail::require(v_feats.cols() == t_feats.cols(),
                  "modalities must share the feature dimension");
  CrossAttentionResult<typename DV::Scalar> result;
  result.a_v_to_t = scaled_dot_attention(t_feats, v_feats, v_feats).output;
  result.a_t_to_v = scaled_dot_attention(v_feats, t_feats, t_feats).output;
  return result;
}

template <typename Scalar>
struct FusedStreams {
  Matrix<Scalar> t_v;  // image stream with attended clinical context
  Matrix<Scalar> t_t;  // clinical stream with attended image context
};

// Residual fusion preserving each stream: T_V = V + A_{T->V}, T_T = T + A_{V->T}.
template <typename DV, typename DT, typename DA1, typename DA2>
FusedStreams<typename DV::Scalar> fuse_residual(const Eigen::MatrixBase<DV>& v_feats,
                                                const Eigen::MatrixBase<DT>& t_feats,
                                                const Eigen::MatrixBase<DA1>& a_v_to_t,
                                                const Eigen::MatrixBase<DA2>& a_t_to_v) {
  detail::require(v_feats.rows() == a_t_to_v.rows() && v_feats.cols() == a_t_to_v.cols(),
                  "image stream and its attended context must agree in shape");
  detail::require(t_feats.rows() == a_v_to_t.rows() && t_feats.cols() == a_v_to_t.cols(),
                  "clinical stream and its attended context must agree in shape");
  FusedStreams<typename DV::Scalar> result;
  result.t_v = v_feats + a_t_to_v;
  result.t_t = t_feats + a_v_to_t;
  return result;
}

namespace detail {

template <typename Scalar, typename Derived>
Matrix<Scalar> l2_normalize_rows(const Eigen::MatrixBase<Derived>& m, const char* what) {
  Matrix<Scalar> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Scalar norm = m.row(i).norm();
    if (!(norm > Scalar(0))) {
      throw std::invalid_argument(std::string(what) + " has a zero-norm row");
    }
    out.row(i) = m.row(i) / norm;
  }
  return out;
}

// Mean cross-entropy of diagonal positives against per-row candidates.
template <typename Scalar>
Scalar info_nce_direction(const Matrix<Scalar>& anchors, const Matrix<Scalar>& candidates,
                          Scalar temperature) {
  Scalar total = Scalar(0);
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    Vector<Scalar> logits = candidates * anchors.row(i).transpose() / temperature;
    Scalar m = logits.maxCoeff();
    Scalar lse = std::log((logits.array() - m).exp().sum()) + m;
    total += lse - logits(i);
  }
  return total / static_cast<Scalar>(anchors.rows());
}

}  // namespace detail

// Symmetric InfoNCE over matched image/text rows. Row i of each side is the
// positive for row i of the other; negatives are the remaining batch rows
// plus any queued features of the opposite modality. Rows are L2-normalized
// internally; already-normalized inputs pass through unchanged. Queues may
// be empty (0 rows); otherwise they must share the feature dimension.
template <typename DI, typename DT>
typename DI::Scalar itc_loss(const Eigen::MatrixBase<DI>& image_feats,
                             const Eigen::MatrixBase<DT>& text_feats,
                             typename DI::Scalar temperature,
                             const Matrix<typename DI::Scalar>& image_queue =
                                 Matrix<typename DI::Scalar>(),
                             const Matrix<typename DI::Scalar>& text_queue =
                                 Matrix<typename DI::Scalar>()) {
  using Scalar = typename DI::Scalar;
  detail::require(image_feats.rows() == text_feats.rows(), "batch sizes must match");
  detail::require(image_feats.rows() >= 1, "batch must be non-empty");
  detail::require(image_feats.cols() == text_feats.cols(),
                  "modalities must share the feature dimension");
  detail::require(temperature > Scalar(0), "temperature must be positive");
  detail::require_finite(image_feats, "image features");
  detail::require_finite(text_feats, "text features");
  const Eigen::Index d = image_feats.cols();
  detail::require(image_queue.rows() == 0 || image_queue.cols() == d,
                  "image queue feature dimension must match");
  detail::require(text_queue.rows() == 0 || text_queue.cols() == d,
                  "text queue feature dimension must match");

  Matrix<Scalar> img = detail::l2_normalize_rows<Scalar>(image_feats, "image features");
  Matrix<Scalar> txt = detail::l2_normalize_rows<Scalar>(text_feats, "text features");

  auto with_queue = [](const Matrix<Scalar>& batch, const Matrix<Scalar>& queue) {
    if (queue.rows() == 0) return batch;
    Matrix<Scalar> all(batch.rows() + queue.rows(), batch.cols());
    all.topRows(batch.rows()) = batch;
    all.bottomRows(queue.rows()) = queue;
    return all;
  };
  Matrix<Scalar> text_candidates =
      with_queue(txt, text_queue.rows() == 0
                          ? text_queue
                          : detail::l2_normalize_rows<Scalar>(text_queue, "text queue"));
  Matrix<Scalar> image_candidates =
      with_queue(img, image_queue.rows() == 0
                          ? image_queue
                          : detail::l2_normalize_rows<Scalar>(image_queue, "image queue"));

  Scalar i2t = detail::info_nce_direction(img, text_candidates, temperature);
  Scalar t2i = detail::info_nce_direction(txt, image_candidates, temperature);
  return (i2t + t2i) / Scalar(2);
}

// FIFO ring buffer of past momentum features with fixed capacity.
template <typename Scalar>
class FeatureQueue {
 public:
  FeatureQueue(Eigen::Index capacity, Eigen::Index dim) : buffer_(capacity, dim) {
    detail::require(capacity >= 1, "queue capacity must be positive");
    detail::require(dim >= 1, "queue feature dimension must be positive");
  }

  void push(const Vector<Scalar>& feature) {
    detail::require(feature.size() == buffer_.cols(), "feature dimension must match the queue");
    buffer_.row(next_) = feature.transpose();
    next_ = (next_ + 1) % buffer_.rows();
    if (count_ < buffer_.rows()) ++count_;
  }

  // Oldest feature first.
  Matrix<Scalar> snapshot() const {
    Matrix<Scalar> out(count_, buffer_.cols());
    Eigen::Index start = count_ < buffer_.rows() ? 0 : next_;
    for (Eigen::Index i = 0; i < count_; ++i) {
      out.row(i) = buffer_.row((start + i) % buffer_.rows());
    }
    return out;
  }

  Eigen::Index size() const { return count_; }
  Eigen::Index capacity() const { return buffer_.rows(); }
  Eigen::Index dim() const { return buffer_.cols(); }

 private:
  Matrix<Scalar> buffer_;
  Eigen::Index next_ = 0;
  Eigen::Index count_ = 0;
};

template <typename Scalar>
struct MomentumState {
  Vector<Scalar> online_params;
  Vector<Scalar> momentum_params;
  Scalar m_c = Scalar(0.995);
  FeatureQueue<Scalar> queue;
};

// EMA step momentum <- m_c * momentum + (1 - m_c) * online, then the updated
// momentum features are enqueued (FIFO eviction at capacity). A contraction
// toward the online params for m_c in (0,1); m_c = 1 freezes, m_c = 0 copies.
template <typename Scalar>
MomentumState<Scalar> momentum_update(MomentumState<Scalar> state) {
  detail::require(state.online_params.size() == state.momentum_params.size(),
                  "online and momentum parameter vectors must have equal length");
  detail::require(state.m_c >= Scalar(0) && state.m_c <= Scalar(1), "m_c must be in [0,1]");
  detail::require_finite(state.online_params, "online params");
  detail::require_finite(state.momentum_params, "momentum params");
  state.momentum_params =
      state.m_c * state.momentum_params + (Scalar(1) - state.m_c) * state.online_params;
  state.queue.push(state.momentum_params);
  return state;
}

// Mean squared error over all entries of shape-equal arrays.
template <typename D1, typename D2>
typename D1::Scalar mse_loss(const Eigen::MatrixBase<D1>& input,
                             const Eigen::MatrixBase<D2>& reconstruction) {
  using Scalar = typename D1::Scalar;
  detail::require(input.rows() == reconstruction.rows() && input.cols() == reconstruction.cols(),
                  "reconstruction shape must match the input");
  detail::require(input.size() >= 1, "reconstruction needs at least one entry");
  detail::require_finite(input, "input");
  detail::require_finite(reconstruction, "reconstruction");
  Scalar total = Scalar(0);
  for (Eigen::Index j = 0; j < input.cols(); ++j) {
    for (Eigen::Index i = 0; i < input.rows(); ++i) {
      Scalar diff = input(i, j) - reconstruction(i, j);
      total += diff * diff;
    }
  }
  return total / static_cast<Scalar>(input.size());
}

// Mean negative log-probability of the gold tokens.
template <typename Derived>
typename Derived::Scalar mean_token_nll(const Eigen::MatrixBase<Derived>& token_logprobs) {
  using Scalar = typename Derived::Scalar;
  detail::require(token_logprobs.size() >= 1, "token log-probs must be non-empty");
  detail::require_finite(token_logprobs, "token log-probs");
  return -token_logprobs.sum() / static_cast<Scalar>(token_logprobs.size());
}

template <typename Scalar>
struct ReconstructionLosses {
  Scalar image;  // MSE
  Scalar text;   // mean gold-token NLL
};

template <typename D1, typename D2, typename D3>
ReconstructionLosses<typename D1::Scalar> reconstruction_losses(
    const Eigen::MatrixBase<D1>& image_in, const Eigen::MatrixBase<D2>& image_rec,
    const Eigen::MatrixBase<D3>& token_logprobs) {
  return ReconstructionLosses<typename D1::Scalar>{mse_loss(image_in, image_rec),
                                                   mean_token_nll(token_logprobs)};
}

// L_itc + lambda_res * (L_res_image + L_res_text).
template <typename Scalar>
Scalar pt_loss(Scalar l_itc, Scalar l_res_image, Scalar l_res_text, Scalar lambda_res) {
  detail::require(lambda_res >= Scalar(0), "lambda_res must be >= 0");
  return l_itc + lambda_res * (l_res_image + l_res_text);
}

// Negative sum of answer-token log-probabilities over a full response; the
// conditioning lives in the caller.
template <typename Derived>
typename Derived::Scalar sft_nll(const Eigen::MatrixBase<Derived>& token_logprobs) {
  detail::require(token_logprobs.size() >= 1, "token log-probs must be non-empty");
  detail::require_finite(token_logprobs, "token log-probs");
  return -token_logprobs.sum();
}

}  // namespace advr::fusion
