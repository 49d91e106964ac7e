#include "advr/builtin_data.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "advr/errors.hpp"

// Mirrors of the files under data/; regenerate by pasting the file bytes if
// the data files change. A test compares the two representations.

namespace advr {

namespace {
const char* const kNorms = R"__advr({
  "schema_version": 1,
  "norms": [
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 7400,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 7300,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 7150,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 6950,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 6700,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 6400,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 6100,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 5800,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 5500,
      "std": 350
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 7100,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 7000,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 6850,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 6650,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 6400,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 6100,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 5800,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 5500,
      "std": 330
    },
    {
      "measurement": "hippocampus",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 5200,
      "std": 330
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 18000,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 20000,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 22500,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 25500,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 29000,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 33000,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 37500,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 42500,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 48000,
      "std": 6000
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 16000,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 18000,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 20500,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 23500,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 27000,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 31000,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 35500,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 40500,
      "std": 5500
    },
    {
      "measurement": "ventricles",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 46000,
      "std": 5500
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 88,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 89,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 90,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 92,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 94,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 96,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 98,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 100,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 102,
      "std": 10
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 88,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 89,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 90,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 92,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 94,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 96,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 98,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 100,
      "std": 9.5
    },
    {
      "measurement": "glucose",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 102,
      "std": 9.5
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 1.0,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 1.02,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 1.04,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 1.06,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 1.08,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 1.1,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 1.12,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 1.14,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 1.16,
      "std": 0.15
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 0.8,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 0.82,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 0.84,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 0.86,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 0.88,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 0.9,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 0.92,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 0.94,
      "std": 0.13
    },
    {
      "measurement": "creatinine",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 0.96,
      "std": 0.13
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 1.8,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 1.9,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 2.0,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 2.1,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 2.2,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 2.3,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 2.4,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 2.5,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 2.6,
      "std": 0.9
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 1.9,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 2.0,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 2.1,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 2.2,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 2.3,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 2.4,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 2.5,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 2.6,
      "std": 1.0
    },
    {
      "measurement": "tsh",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 2.7,
      "std": 1.0
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 520,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 510,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 500,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 490,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 480,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 470,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 460,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 450,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "M",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 440,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 18,
      "age_hi": 29,
      "mean": 520,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 30,
      "age_hi": 39,
      "mean": 510,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 40,
      "age_hi": 49,
      "mean": 500,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 50,
      "age_hi": 59,
      "mean": 490,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 60,
      "age_hi": 69,
      "mean": 480,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 70,
      "age_hi": 79,
      "mean": 470,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 80,
      "age_hi": 89,
      "mean": 460,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 90,
      "age_hi": 99,
      "mean": 450,
      "std": 150
    },
    {
      "measurement": "vitamin_b12",
      "sex": "F",
      "age_lo": 100,
      "age_hi": 110,
      "mean": 440,
      "std": 150
    }
  ]
}
)__advr";
const char* const kRanges = R"__advr({
  "schema_version": 1,
  "reference_ranges": {
    "Abeta": {"lower": 800.0, "upper": 1700.0, "unit": "pg/mL"},
    "tTau": {"lower": 80.0, "upper": 300.0, "unit": "pg/mL"},
    "pTau": {"lower": 8.0, "upper": 27.0, "unit": "pg/mL"}
  }
}
)__advr";
const char* const kNiaaa = R"__advr({
  "schema_version": 1,
  "name": "NIA-AA",
  "category_keywords": {
    "CN": [
      "cognitively normal",
      "normal cognition",
      "intact cognition",
      "no cognitive impairment"
    ],
    "MCI": [
      "mild cognitive impairment",
      "mci due to alzheimer's disease",
      "preserved independence",
      "cognitive concern"
    ],
    "Dementia": [
      "alzheimer's dementia",
      "probable ad dementia",
      "dementia",
      "impaired daily functioning"
    ]
  },
  "exclusion_terms": {
    "CN": [
      "objective cognitive impairment",
      "functional decline",
      "impaired activities of daily living"
    ],
    "MCI": [
      "profound functional decline",
      "severe functional impairment",
      "loss of independence",
      "fully dependent"
    ],
    "Dementia": [
      "preserved independence",
      "intact activities of daily living",
      "no functional impairment"
    ]
  },
  "biomarker_lexicon": {
    "Abeta": {
      "synonyms": ["amyloid beta", "amyloid-beta", "beta-amyloid", "abeta", "amyloid"],
      "normal_terms": ["normal", "within normal limits", "preserved", "unremarkable"],
      "abnormal_terms": ["abnormal", "reduced", "decreased", "low", "depressed"]
    },
    "tTau": {
      "synonyms": ["total tau", "t-tau", "ttau", "tau"],
      "normal_terms": ["normal", "within normal limits", "unremarkable"],
      "abnormal_terms": ["abnormal", "elevated", "increased", "high", "raised"]
    },
    "pTau": {
      "synonyms": ["phosphorylated tau", "p-tau", "ptau", "p-tau181"],
      "normal_terms": ["normal", "within normal limits", "unremarkable"],
      "abnormal_terms": ["abnormal", "elevated", "increased", "high", "raised"]
    }
  },
  "domain_lexicon": {
    "memory": {
      "domain_terms": ["memory", "amnestic", "amnesia"],
      "subdomains": {
        "episodic": ["episodic memory", "delayed recall", "rapid forgetting"],
        "semantic": ["semantic memory", "word knowledge"],
        "recognition": ["recognition memory", "cued recall"]
      }
    },
    "executive": {
      "domain_terms": ["executive", "executive function", "executive functioning"],
      "subdomains": {
        "planning": ["planning", "organization"],
        "reasoning": ["problem solving", "judgment", "abstract reasoning"],
        "attention": ["attention", "working memory", "processing speed"]
      }
    },
    "visuospatial": {
      "domain_terms": ["visuospatial", "visuoconstructional", "spatial"],
      "subdomains": {
        "navigation": ["getting lost", "topographical disorientation", "navigation"],
        "construction": ["figure copying", "clock drawing", "constructional apraxia"],
        "perception": ["object recognition", "face recognition", "visual perception"]
      }
    },
    "language": {
      "domain_terms": ["language", "aphasia", "anomia"],
      "subdomains": {
        "naming": ["word-finding", "word finding", "naming difficulty", "anomic"],
        "fluency": ["verbal fluency", "reduced fluency"],
        "comprehension": ["comprehension", "sentence repetition"]
      }
    }
  }
}
)__advr";
const char* const kIwg2 = R"__advr({
  "schema_version": 1,
  "name": "IWG-2",
  "category_keywords": {
    "CN": [
      "asymptomatic at risk",
      "cognitively normal",
      "normal cognition"
    ],
    "MCI": [
      "prodromal alzheimer's disease",
      "prodromal ad",
      "predementia stage"
    ],
    "Dementia": [
      "alzheimer's disease dementia",
      "ad dementia",
      "dementia stage"
    ]
  },
  "exclusion_terms": {
    "CN": [
      "objective cognitive impairment",
      "positive pathophysiological marker"
    ],
    "MCI": [
      "profound functional decline",
      "dementia-level impairment",
      "loss of autonomy"
    ],
    "Dementia": [
      "preserved autonomy",
      "normal instrumental activities"
    ]
  },
  "biomarker_lexicon": {
    "Abeta": {
      "synonyms": ["amyloid beta", "amyloid-beta", "csf amyloid", "abeta", "amyloid"],
      "normal_terms": ["normal", "within normal limits", "unremarkable"],
      "abnormal_terms": ["abnormal", "reduced", "decreased", "low", "pathological"]
    },
    "tTau": {
      "synonyms": ["total tau", "t-tau", "ttau", "tau"],
      "normal_terms": ["normal", "within normal limits", "unremarkable"],
      "abnormal_terms": ["abnormal", "elevated", "increased", "high", "pathological"]
    },
    "pTau": {
      "synonyms": ["phosphorylated tau", "p-tau", "ptau"],
      "normal_terms": ["normal", "within normal limits", "unremarkable"],
      "abnormal_terms": ["abnormal", "elevated", "increased", "high", "pathological"]
    }
  },
  "domain_lexicon": {
    "memory": {
      "domain_terms": ["memory", "amnestic syndrome", "amnestic"],
      "subdomains": {
        "episodic": ["episodic memory", "free recall", "cued recall", "delayed recall"]
      }
    },
    "executive": {
      "domain_terms": ["executive", "executive function"],
      "subdomains": {
        "planning": ["planning"],
        "attention": ["attention", "processing speed"]
      }
    },
    "visuospatial": {
      "domain_terms": ["visuospatial", "spatial"],
      "subdomains": {
        "construction": ["clock drawing", "figure copying"],
        "navigation": ["getting lost"]
      }
    },
    "language": {
      "domain_terms": ["language", "aphasia"],
      "subdomains": {
        "naming": ["naming difficulty", "word-finding"],
        "fluency": ["verbal fluency"]
      }
    }
  }
}
)__advr";

}  // namespace

const std::string& builtin_norms_json() {
  static const std::string doc(kNorms);
  return doc;
}

const std::string& builtin_guideline_json(std::string_view name) {
  static const std::string niaaa(kNiaaa);
  static const std::string iwg2(kIwg2);
  if (name == "niaaa") return niaaa;
  if (name == "iwg2") return iwg2;
  throw std::invalid_argument("unknown bundled guideline: " + std::string(name));
}

NormTable builtin_norm_table() {
  return NormTable::from_json(nlohmann::json::parse(builtin_norms_json()));
}

ReferenceRanges builtin_reference_ranges() {
  static const std::string ranges(kRanges);
  return ranges_from_json(nlohmann::json::parse(ranges));
}

}  // namespace advr
