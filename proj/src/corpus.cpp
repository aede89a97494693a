#include "taskdisc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "taskdisc/errors.hpp"
#include "taskdisc/hash.hpp"
#include "taskdisc/jsonl.hpp"
#include "taskdisc/lexical_graph.hpp"
#include "taskdisc/rng.hpp"

namespace taskdisc::corpus {

const std::string& VqaTriple::modal_answer() const {
  // highest count; lexicographically smallest on ties
  std::map<std::string, int> counts;
  for (const auto& a : gt) ++counts[a];
  const std::string* best = nullptr;
  int best_count = -1;
  for (const auto& [answer, count] : counts) {
    if (count > best_count) {
      best = &answer;
      best_count = count;
    }
  }
  return gt[static_cast<size_t>(
      std::find(gt.begin(), gt.end(), *best) - gt.begin())];
}

AnswerVocabulary::AnswerVocabulary(std::vector<std::string> all_answers,
                                   const std::set<std::string>& oov)
    : answers_(std::move(all_answers)), oov_(oov) {
  for (size_t i = 0; i < answers_.size(); ++i) index_[answers_[i]] = i;
  for (const auto& a : oov_) {
    if (!index_.count(a)) throw UnknownAnswer("oov answer not in vocabulary: " + a);
  }
  if (oov_.size() >= answers_.size()) {
    throw EmptySplit("trained subset would be empty: every answer marked out-of-vocabulary");
  }
}

size_t AnswerVocabulary::index_of(const std::string& answer) const {
  auto it = index_.find(answer);
  if (it == index_.end()) throw UnknownAnswer("unknown answer: " + answer);
  return it->second;
}

bool AnswerVocabulary::is_oov(const std::string& answer) const {
  if (!index_.count(answer)) throw UnknownAnswer("unknown answer: " + answer);
  return oov_.count(answer) != 0;
}

std::vector<std::string> AnswerVocabulary::trained() const {
  std::vector<std::string> out;
  out.reserve(answers_.size() - oov_.size());
  for (const auto& a : answers_) {
    if (!oov_.count(a)) out.push_back(a);
  }
  return out;
}

json AnswerVocabulary::to_json() const {
  return json{{"answers", answers_}, {"oov", oov_}};
}

AnswerVocabulary AnswerVocabulary::from_json(const json& j) {
  std::set<std::string> oov;
  for (const auto& a : j.at("oov")) oov.insert(a.get<std::string>());
  return AnswerVocabulary(j.at("answers").get<std::vector<std::string>>(), oov);
}

void SceneBank::add_scene(const std::string& scene_id, const std::vector<Box>& boxes,
                          const std::vector<float>& row_major_features) {
  if (row_major_features.size() != boxes.size() * d_v_) {
    throw MalformedRecord("scene " + scene_id + ": feature row count does not match boxes");
  }
  if (scenes_.count(scene_id)) throw MalformedRecord("duplicate scene id: " + scene_id);
  SceneEntry entry;
  entry.row_begin = total_rows();
  entry.boxes = boxes;
  rows_.insert(rows_.end(), row_major_features.begin(), row_major_features.end());
  scenes_.emplace(scene_id, std::move(entry));
}

size_t SceneBank::region_count(const std::string& scene_id) const {
  return boxes(scene_id).size();
}

const float* SceneBank::region_feature(const std::string& scene_id, size_t region) const {
  auto it = scenes_.find(scene_id);
  if (it == scenes_.end()) throw MalformedRecord("unknown scene id: " + scene_id);
  if (region >= it->second.boxes.size()) {
    throw RegionOutOfBounds("scene " + scene_id + " has no region " + std::to_string(region));
  }
  return rows_.data() + (it->second.row_begin + region) * d_v_;
}

const std::vector<Box>& SceneBank::boxes(const std::string& scene_id) const {
  auto it = scenes_.find(scene_id);
  if (it == scenes_.end()) throw MalformedRecord("unknown scene id: " + scene_id);
  return it->second.boxes;
}

std::optional<size_t> SceneBank::region_index(const std::string& scene_id, const Box& box) const {
  const auto& all = boxes(scene_id);
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i] == box) return i;
  }
  return std::nullopt;
}

std::vector<std::string> SceneBank::scene_ids() const {
  std::vector<std::string> out;
  out.reserve(scenes_.size());
  for (const auto& [id, entry] : scenes_) out.push_back(id);
  return out;
}

void SceneBank::save(const std::string& path, const std::string& config_hash) const {
  json header{{"format", "taskdisc-scenebank-v1"},
              {"d_v", d_v_},
              {"n_rows", total_rows()},
              {"n_scenes", scenes_.size()},
              {"config_hash", config_hash}};
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedRecord("cannot write scene bank: " + path);
  const uint64_t header_len = header_bytes.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
  out.write(reinterpret_cast<const char*>(rows_.data()),
            static_cast<std::streamsize>(rows_.size() * sizeof(float)));

  json index = json::object();
  for (const auto& [id, entry] : scenes_) {
    json boxes_json = json::array();
    for (const auto& b : entry.boxes) boxes_json.push_back({b.x, b.y, b.w, b.h});
    index[id] = {{"rows", {entry.row_begin, entry.row_begin + entry.boxes.size()}},
                 {"boxes", boxes_json}};
  }
  std::ofstream side(path + ".index.json");
  side << json{{"config_hash", config_hash}, {"scenes", index}}.dump(2) << "\n";
}

SceneBank SceneBank::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedRecord("cannot open scene bank: " + path);
  uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  const json header = json::parse(header_bytes, nullptr, false);
  if (header.is_discarded()) throw MalformedRecord("scene bank header is not JSON");

  SceneBank bank(header.at("d_v").get<size_t>());
  const size_t n_rows = header.at("n_rows").get<size_t>();
  std::vector<float> all_rows(n_rows * bank.d_v_);
  in.read(reinterpret_cast<char*>(all_rows.data()),
          static_cast<std::streamsize>(all_rows.size() * sizeof(float)));
  if (!in) throw MalformedRecord("scene bank payload truncated");

  std::ifstream side(path + ".index.json");
  if (!side) throw MalformedRecord("missing scene bank index: " + path + ".index.json");
  json index_doc;
  side >> index_doc;
  for (const auto& [id, entry] : index_doc.at("scenes").items()) {
    const auto rows = entry.at("rows").get<std::vector<size_t>>();
    std::vector<Box> boxes;
    for (const auto& b : entry.at("boxes")) {
      boxes.push_back(Box{b[0].get<float>(), b[1].get<float>(), b[2].get<float>(),
                          b[3].get<float>()});
    }
    std::vector<float> scene_rows(all_rows.begin() + static_cast<long>(rows[0] * bank.d_v_),
                                  all_rows.begin() + static_cast<long>(rows[1] * bank.d_v_));
    bank.add_scene(id, boxes, scene_rows);
  }
  return bank;
}

uint64_t SceneBank::content_hash() const {
  uint64_t h = fnv1a64(rows_.data(), rows_.size() * sizeof(float));
  for (const auto& [id, entry] : scenes_) {
    h = fnv1a64(id, h);
    h = fnv1a64(entry.boxes.data(), entry.boxes.size() * sizeof(Box), h);
  }
  return h;
}

namespace {

bool box_in_bounds(const Box& b) {
  return b.x >= 0.f && b.y >= 0.f && b.w > 0.f && b.h > 0.f && b.x + b.w <= 1.f + 1e-6f &&
         b.y + b.h <= 1.f + 1e-6f;
}

bool mentions_answer(const std::vector<std::string>& description, const std::string& answer) {
  std::vector<std::string> answer_tokens;
  std::string token;
  for (char c : answer + " ") {
    if (c == ' ') {
      if (!token.empty()) answer_tokens.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (answer_tokens.empty() || description.size() < answer_tokens.size()) return false;
  for (size_t i = 0; i + answer_tokens.size() <= description.size(); ++i) {
    if (std::equal(answer_tokens.begin(), answer_tokens.end(), description.begin() + i)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<VisualQuadruple> ingest_quadruples(const std::string& path,
                                               const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw MalformedRecord("cannot open quadruples: " + path);
  std::vector<VisualQuadruple> out;
  for_each_jsonl(
      in,
      [&](size_t line_no, const json& record) {
        const auto fail = [&](const std::string& why) {
          throw MalformedRecord("line " + std::to_string(line_no) + ": " + why);
        };
        if (!record.contains("answer") || !record.contains("scene") ||
            !record.contains("box") || !record.contains("description")) {
          fail("quadruple needs answer/scene/box/description");
        }
        VisualQuadruple q;
        q.answer = lex::normalize_word(record["answer"].get<std::string>());
        q.scene_id = record["scene"].is_string() ? record["scene"].get<std::string>()
                                                 : record["scene"].dump();
        const auto& box = record["box"];
        if (!box.is_array() || box.size() != 4) fail("box must be [x,y,w,h]");
        q.box = Box{box[0].get<float>(), box[1].get<float>(), box[2].get<float>(),
                    box[3].get<float>()};
        if (!box_in_bounds(q.box)) {
          throw RegionOutOfBounds("line " + std::to_string(line_no) +
                                  ": region outside scene bounds");
        }
        for (const auto& tok : record["description"]) {
          q.description.push_back(lex::normalize_word(tok.get<std::string>()));
        }
        if (options.require_answer_mention && !mentions_answer(q.description, q.answer)) {
          fail("description does not mention answer '" + q.answer + "'");
        }
        out.push_back(std::move(q));
      },
      [](size_t line_no, const std::string&) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": not valid JSON");
      });
  return out;
}

std::vector<VqaTriple> ingest_triples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedRecord("cannot open triples: " + path);
  std::vector<VqaTriple> out;
  for_each_jsonl(
      in,
      [&](size_t line_no, const json& record) {
        const auto fail = [&](const std::string& why) {
          throw MalformedRecord("line " + std::to_string(line_no) + ": " + why);
        };
        if (!record.contains("question") || !record.contains("scene") || !record.contains("gt")) {
          fail("triple needs question/scene/gt");
        }
        VqaTriple t;
        t.id = record.value("id", "q" + std::to_string(line_no));
        for (const auto& tok : record["question"]) {
          t.question.push_back(lex::normalize_word(tok.get<std::string>()));
        }
        t.scene_id = record["scene"].is_string() ? record["scene"].get<std::string>()
                                                 : record["scene"].dump();
        if (!record["gt"].is_array() || record["gt"].size() != 10) {
          throw GroundTruthCountMismatch("line " + std::to_string(line_no) + ": expected 10 ground truths, got " +
                                         std::to_string(record["gt"].size()));
        }
        for (const auto& a : record["gt"]) t.gt.push_back(lex::normalize_word(a.get<std::string>()));
        t.slot = record.value("slot", "");
        out.push_back(std::move(t));
      },
      [](size_t line_no, const std::string&) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": not valid JSON");
      });
  return out;
}

void write_quadruples(const std::string& path, const std::vector<VisualQuadruple>& quadruples) {
  std::ofstream out(path);
  for (const auto& q : quadruples) {
    json record{{"answer", q.answer},
                {"scene", q.scene_id},
                {"box", {q.box.x, q.box.y, q.box.w, q.box.h}},
                {"description", q.description}};
    out << record.dump() << "\n";
  }
}

void write_triples(const std::string& path, const std::vector<VqaTriple>& triples) {
  std::ofstream out(path);
  for (const auto& t : triples) {
    json record{{"id", t.id},
                {"question", t.question},
                {"scene", t.scene_id},
                {"gt", t.gt}};
    if (!t.slot.empty()) record["slot"] = t.slot;
    out << record.dump() << "\n";
  }
}

json OovSplit::to_json() const {
  return json{{"vocab", vocab.to_json()}, {"train", train},      {"val", val},
              {"test_oov", test_oov},     {"test_mixed", test_mixed}};
}

OovSplit OovSplit::from_json(const json& j) {
  OovSplit s;
  s.vocab = AnswerVocabulary::from_json(j.at("vocab"));
  s.train = j.at("train").get<std::vector<size_t>>();
  s.val = j.at("val").get<std::vector<size_t>>();
  s.test_oov = j.at("test_oov").get<std::vector<size_t>>();
  s.test_mixed = j.at("test_mixed").get<std::vector<size_t>>();
  return s;
}

OovSplit build_oov_split(const std::vector<VqaTriple>& triples,
                         const std::vector<std::string>& all_answers,
                         const std::vector<std::string>& oov_candidates, double oov_fraction,
                         uint64_t seed) {
  if (oov_fraction < 0.0 || oov_fraction >= 1.0) {
    throw ConfigInvalid("oov_fraction must be in [0, 1)");
  }

  // seeded selection: shuffle the candidate pool, take the first k
  std::vector<std::string> pool = oov_candidates;
  std::sort(pool.begin(), pool.end());
  Rng rng(seed);
  rng.shuffle(pool);
  const auto k = static_cast<size_t>(std::llround(oov_fraction * static_cast<double>(pool.size())));
  std::set<std::string> oov(pool.begin(), pool.begin() + static_cast<long>(k));

  AnswerVocabulary vocab(all_answers, oov);

  OovSplit split;
  split.vocab = vocab;

  std::vector<size_t> clean;  // no out-of-vocabulary string among the ground truths
  for (size_t i = 0; i < triples.size(); ++i) {
    size_t oov_count = 0;
    for (const auto& a : triples[i].gt) {
      if (!vocab.contains(a)) {
        throw UnknownAnswer("triple " + triples[i].id + " has answer outside the vocabulary: " + a);
      }
      if (vocab.is_oov(a)) ++oov_count;
    }
    if (oov_count == triples[i].gt.size()) {
      split.test_oov.push_back(i);
      split.test_mixed.push_back(i);
    } else if (oov_count == 0) {
      clean.push_back(i);
    } else {
      split.test_mixed.push_back(i);  // straddles the boundary: test-only
    }
  }

  Rng clean_rng = Rng::fork(seed, 1);
  clean_rng.shuffle(clean);
  const size_t n_val = clean.size() / 10;
  const size_t n_heldout = clean.size() / 10;
  const size_t n_train = clean.size() - n_val - n_heldout;
  split.train.assign(clean.begin(), clean.begin() + static_cast<long>(n_train));
  split.val.assign(clean.begin() + static_cast<long>(n_train),
                   clean.begin() + static_cast<long>(n_train + n_val));
  for (size_t i = n_train + n_val; i < clean.size(); ++i) split.test_mixed.push_back(clean[i]);

  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test_mixed.begin(), split.test_mixed.end());

  if (split.train.empty()) throw EmptySplit("train split is empty");
  if (split.val.empty()) throw EmptySplit("val split is empty");
  if (split.test_oov.empty()) {
    throw EmptySplit("test_oov split is empty (oov_fraction too small?)");
  }
  return split;
}

}  // namespace taskdisc::corpus
