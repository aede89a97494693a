#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace taskdisc::corpus {

using json = nlohmann::json;

// scene-relative units; scenes span the unit square
struct Box {
  float x = 0, y = 0, w = 0, h = 0;
  float cx() const { return x + 0.5f * w; }
  float cy() const { return y + 0.5f * h; }
  bool operator==(const Box&) const = default;
};

// (answer, scene, box, description) — one labeled region with a sentence
// that mentions the label
struct VisualQuadruple {
  std::string answer;
  std::string scene_id;
  Box box;
  std::vector<std::string> description;
};

// (question, scene, ten ground-truth answers); `slot` is an optional
// annotation naming the recognition task family the question came from
struct VqaTriple {
  std::string id;
  std::vector<std::string> question;
  std::string scene_id;
  std::vector<std::string> gt;  // exactly 10
  std::string slot;             // may be empty

  const std::string& modal_answer() const;
};

// All answers 𝒜 in a stable order, with the trained subset ℬ marked.
// oov == 𝒜 − ℬ.
class AnswerVocabulary {
public:
  AnswerVocabulary() = default;
  AnswerVocabulary(std::vector<std::string> all_answers, const std::set<std::string>& oov);

  size_t size() const { return answers_.size(); }
  const std::vector<std::string>& answers() const { return answers_; }
  bool contains(const std::string& answer) const { return index_.count(answer) != 0; }
  size_t index_of(const std::string& answer) const;  // throws UnknownAnswer
  bool is_oov(const std::string& answer) const;
  const std::set<std::string>& oov() const { return oov_; }
  std::vector<std::string> trained() const;  // ℬ, in vocabulary order

  json to_json() const;
  static AnswerVocabulary from_json(const json& j);

private:
  std::vector<std::string> answers_;
  std::map<std::string, size_t> index_;
  std::set<std::string> oov_;
};

// Region features per scene. The same scene id resolves to bit-identical
// rows in every phase that reads the bank.
class SceneBank {
public:
  SceneBank() = default;
  explicit SceneBank(size_t d_v) : d_v_(d_v) {}

  size_t d_v() const { return d_v_; }
  size_t scene_count() const { return scenes_.size(); }
  size_t total_rows() const { return rows_.size() / (d_v_ ? d_v_ : 1); }

  void add_scene(const std::string& scene_id, const std::vector<Box>& boxes,
                 const std::vector<float>& row_major_features);

  bool contains(const std::string& scene_id) const { return scenes_.count(scene_id) != 0; }
  size_t region_count(const std::string& scene_id) const;
  const float* region_feature(const std::string& scene_id, size_t region) const;
  const std::vector<Box>& boxes(const std::string& scene_id) const;
  // exact box match; nullopt when the box is not one of the scene's regions
  std::optional<size_t> region_index(const std::string& scene_id, const Box& box) const;
  std::vector<std::string> scene_ids() const;  // sorted

  // binary file: u64 header length + JSON header + float32 rows,
  // with a sidecar <path>.index.json mapping scene id -> row range + boxes
  void save(const std::string& path, const std::string& config_hash) const;
  static SceneBank load(const std::string& path);

  uint64_t content_hash() const;

private:
  struct SceneEntry {
    size_t row_begin = 0;
    std::vector<Box> boxes;
  };
  size_t d_v_ = 0;
  std::vector<float> rows_;
  std::map<std::string, SceneEntry> scenes_;
};

struct IngestOptions {
  bool require_answer_mention = false;  // enforce that the description mentions the answer
};

// quadruples JSONL: {"answer","scene","box":[x,y,w,h],"description":[tokens]}
std::vector<VisualQuadruple> ingest_quadruples(const std::string& path,
                                               const IngestOptions& options = {});
// triples JSONL: {"id","question":[tokens],"scene","gt":[10 strings],"slot"?}
std::vector<VqaTriple> ingest_triples(const std::string& path);

void write_quadruples(const std::string& path, const std::vector<VisualQuadruple>& quadruples);
void write_triples(const std::string& path, const std::vector<VqaTriple>& triples);

// Partition of question indices. train/val never see an out-of-vocabulary
// string among their ground truths; test_oov holds questions whose ground
// truths are entirely out-of-vocabulary; test_mixed carries everything held
// out for testing, both in-vocabulary and out.
struct OovSplit {
  AnswerVocabulary vocab;
  std::vector<size_t> train;
  std::vector<size_t> val;
  std::vector<size_t> test_oov;
  std::vector<size_t> test_mixed;

  json to_json() const;
  static OovSplit from_json(const json& j);
};

// `oov_candidates` is the pool the out-of-vocabulary answers are drawn from
// (, e.g. the visual words; non-visual answers like yes/no stay trained).
OovSplit build_oov_split(const std::vector<VqaTriple>& triples,
                         const std::vector<std::string>& all_answers,
                         const std::vector<std::string>& oov_candidates, double oov_fraction,
                         uint64_t seed);

}  // namespace taskdisc::corpus
