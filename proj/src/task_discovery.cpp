#include "taskdisc/task_discovery.hpp"

#include <algorithm>
#include <sstream>

#include "taskdisc/errors.hpp"

namespace taskdisc::task {

TaskSpec TaskSpec::make_description(std::vector<std::string> tokens) {
  TaskSpec spec;
  spec.kind = Kind::description;
  spec.tokens = std::move(tokens);
  return spec;
}

TaskSpec TaskSpec::make_synset(std::string synset) {
  TaskSpec spec;
  spec.kind = Kind::synset;
  spec.synset = std::move(synset);
  return spec;
}

json TaskSpec::to_json() const {
  if (kind == Kind::description) {
    return json{{"kind", "description"}, {"tokens", tokens}};
  }
  return json{{"kind", "synset"}, {"id", synset}};
}

TaskSpec TaskSpec::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "description") {
    return make_description(j.at("tokens").get<std::vector<std::string>>());
  }
  if (kind == "synset") return make_synset(j.at("id").get<std::string>());
  throw MalformedRecord("unknown task kind: " + kind);
}

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

TaskSpec blank(const std::vector<std::string>& description, const std::string& answer) {
  const std::vector<std::string> answer_tokens = split_tokens(answer);
  if (answer_tokens.empty()) throw AnswerNotInDescription("empty answer");

  for (size_t i = 0; i + answer_tokens.size() <= description.size(); ++i) {
    if (!std::equal(answer_tokens.begin(), answer_tokens.end(), description.begin() + i)) {
      continue;
    }
    std::vector<std::string> blanked;
    blanked.reserve(description.size() - answer_tokens.size() + 1);
    blanked.insert(blanked.end(), description.begin(), description.begin() + static_cast<long>(i));
    blanked.push_back(blank_token());
    blanked.insert(blanked.end(), description.begin() + static_cast<long>(i + answer_tokens.size()),
                   description.end());
    return TaskSpec::make_description(std::move(blanked));
  }

  std::ostringstream msg;
  msg << "answer '" << answer << "' does not occur in description";
  throw AnswerNotInDescription(msg.str());
}

std::map<std::string, double> task_given_answer(const std::string& answer,
                                                const lex::InvertedWordGroupTable& inverted) {
  auto it = inverted.find(answer);
  if (it == inverted.end() || it->second.empty()) {
    throw AnswerUnknownToTaxonomy("answer not covered by any word group: " + answer);
  }
  const double p = 1.0 / static_cast<double>(it->second.size());
  std::map<std::string, double> out;
  for (const auto& synset : it->second) out[synset] = p;
  return out;
}

SamplerMode sampler_mode_from_string(const std::string& name) {
  if (name == "description") return SamplerMode::description;
  if (name == "wordnet") return SamplerMode::wordnet;
  if (name == "both") return SamplerMode::both;
  throw ConfigInvalid("unknown sampler mode: " + name);
}

std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::description: return "description";
    case SamplerMode::wordnet: return "wordnet";
    case SamplerMode::both: return "both";
  }
  return "?";
}

TaskSampler::TaskSampler(const lex::InvertedWordGroupTable* inverted, SamplerMode mode,
                         uint64_t seed, double description_weight)
    : inverted_(inverted), mode_(mode), description_weight_(description_weight), rng_(seed) {
  if ((mode == SamplerMode::wordnet || mode == SamplerMode::both) && inverted_ == nullptr) {
    throw ConfigInvalid("wordnet sampling needs an inverted word group table");
  }
}

std::optional<PretrainTuple> TaskSampler::sample(const corpus::VisualQuadruple& datum) {
  bool use_description = mode_ == SamplerMode::description;
  if (mode_ == SamplerMode::both) use_description = rng_.coin(description_weight_);

  PretrainTuple tuple;
  tuple.answer = datum.answer;
  tuple.scene_id = datum.scene_id;
  tuple.box = datum.box;

  if (use_description) {
    tuple.task = blank(datum.description, datum.answer);
    return tuple;
  }

  auto it = inverted_->find(datum.answer);
  if (it == inverted_->end() || it->second.empty()) {
    ++skipped_;  // taxonomy does not cover this answer; skip with a warning upstream
    return std::nullopt;
  }
  const size_t pick = rng_.index(it->second.size());
  auto synset_it = it->second.begin();
  std::advance(synset_it, static_cast<long>(pick));
  tuple.task = TaskSpec::make_synset(*synset_it);
  return tuple;
}

}  // namespace taskdisc::task
