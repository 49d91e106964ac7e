#pragma once

#include <semaphore>
#include <string>

namespace advr {

struct ParsedUrl {
  std::string base;  // scheme://host[:port], as httplib expects
  std::string path;  // leading slash, "/" when the url has no path
};

// Accepts plain-http urls; https needs TLS support the bundled client is
// built without, so it is rejected up front. Throws ConfigError.
ParsedUrl parse_url(const std::string& url);

// RAII slot on a counting semaphore bounding concurrent in-flight requests.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& slots) : slots_(slots) { slots_.acquire(); }
  ~SlotGuard() { slots_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& slots_;
};

}  // namespace advr
