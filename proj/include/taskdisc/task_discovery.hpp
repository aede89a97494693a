#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskdisc/corpus.hpp"
#include "taskdisc/lexical_graph.hpp"
#include "taskdisc/rng.hpp"

namespace taskdisc::task {

using json = nlohmann::json;

inline const std::string& blank_token() {
  static const std::string token = "<blank>";
  return token;
}

// A recognition-task handle: either a description with the answer blanked
// out, or a synset naming a word group.
struct TaskSpec {
  enum class Kind { description, synset };
  Kind kind = Kind::description;
  std::vector<std::string> tokens;  // description variant; contains <blank> exactly once
  std::string synset;               // synset variant

  static TaskSpec make_description(std::vector<std::string> tokens);
  static TaskSpec make_synset(std::string synset);

  bool operator==(const TaskSpec&) const = default;
  json to_json() const;
  static TaskSpec from_json(const json& j);
};

// Replace the first occurrence of `answer` (a token subsequence, possibly
// multiword) in `description` with the blank token.
TaskSpec blank(const std::vector<std::string>& description, const std::string& answer);

// Uniform distribution over the synsets whose word group contains the answer.
std::map<std::string, double> task_given_answer(const std::string& answer,
                                                const lex::InvertedWordGroupTable& inverted);

enum class SamplerMode { description, wordnet, both };

SamplerMode sampler_mode_from_string(const std::string& name);
std::string to_string(SamplerMode mode);

// (answer, scene, region box, task) handed to pretraining. The source
// description is dropped once the task is formed.
struct PretrainTuple {
  std::string answer;
  std::string scene_id;
  corpus::Box box;
  TaskSpec task;
};

// Stateful sampling stream over visual quadruples. One sampler per worker;
// derive worker seeds with Rng::fork(seed, worker_index).
class TaskSampler {
public:
  TaskSampler(const lex::InvertedWordGroupTable* inverted, SamplerMode mode, uint64_t seed,
              double description_weight = 0.5);

  // nullopt means the datum was skipped (answer missing from the taxonomy in
  // a wordnet draw); skips are counted, not fatal
  std::optional<PretrainTuple> sample(const corpus::VisualQuadruple& datum);

  SamplerMode mode() const { return mode_; }
  size_t skipped() const { return skipped_; }

private:
  const lex::InvertedWordGroupTable* inverted_;
  SamplerMode mode_;
  double description_weight_;
  Rng rng_;
  size_t skipped_ = 0;
};

}  // namespace taskdisc::task
