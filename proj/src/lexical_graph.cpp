#include "taskdisc/lexical_graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "taskdisc/errors.hpp"
#include "taskdisc/jsonl.hpp"
#include "taskdisc/rng.hpp"

namespace taskdisc::lex {

bool valid_synset_id(const std::string& name) {
  // lemma.pos.nn, matched from the right so lemmas may contain dots
  const size_t last = name.rfind('.');
  if (last == std::string::npos || last + 3 != name.size()) return false;
  if (!std::isdigit(static_cast<unsigned char>(name[last + 1])) ||
      !std::isdigit(static_cast<unsigned char>(name[last + 2]))) {
    return false;
  }
  const size_t pos_dot = name.rfind('.', last - 1);
  if (pos_dot == std::string::npos || pos_dot == 0 || pos_dot + 1 == last) return false;
  for (size_t i = pos_dot + 1; i < last; ++i) {
    if (!std::islower(static_cast<unsigned char>(name[i]))) return false;
  }
  return true;
}

std::string normalize_word(const std::string& word) {
  std::string out;
  out.reserve(word.size());
  bool pending_space = false;
  for (char raw : word) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

uint32_t LexicalGraph::node_index(const std::string& synset) const {
  auto it = index_.find(synset);
  if (it == index_.end()) throw UnknownSynset("unknown synset: " + synset);
  return it->second;
}

uint32_t LexicalGraph::add_node(const std::string& synset) {
  auto [it, inserted] = index_.emplace(synset, static_cast<uint32_t>(names_.size()));
  if (inserted) {
    names_.push_back(synset);
    children_.emplace_back();
    lemmas_.emplace_back();
  }
  return it->second;
}

void LexicalGraph::add_lemma(uint32_t idx, const std::string& word) {
  const std::string norm = normalize_word(word);
  if (!norm.empty()) lemmas_[idx].insert(norm);
}

void LexicalGraph::add_edge(uint32_t hypernym, uint32_t hyponym) {
  auto& kids = children_[hypernym];
  if (std::find(kids.begin(), kids.end(), hyponym) != kids.end()) return;
  kids.push_back(hyponym);
  ++edge_count_;
}

void LexicalGraph::finalize() {
  // iterative DFS coloring; a back edge is reported as the cycle witness
  enum : uint8_t { unseen = 0, open = 1, done = 2 };
  std::vector<uint8_t> state(names_.size(), unseen);
  std::vector<std::pair<uint32_t, size_t>> stack;
  for (uint32_t root = 0; root < names_.size(); ++root) {
    if (state[root] != unseen) continue;
    stack.emplace_back(root, 0);
    state[root] = open;
    while (!stack.empty()) {
      auto& [node, next_child] = stack.back();
      if (next_child < children_[node].size()) {
        const uint32_t child = children_[node][next_child++];
        if (state[child] == open) {
          throw CycleDetected("cycle through edge " + names_[node] + " -> " + names_[child]);
        }
        if (state[child] == unseen) {
          state[child] = open;
          stack.emplace_back(child, 0);
        }
      } else {
        state[node] = done;
        stack.pop_back();
      }
    }
  }
}

std::string LexicalGraph::to_jsonl() const {
  std::ostringstream out;
  for (uint32_t i = 0; i < names_.size(); ++i) {
    json record{{"type", "synset"}, {"id", names_[i]}, {"lemmas", lemmas_[i]}};
    out << record.dump() << "\n";
  }
  for (uint32_t i = 0; i < names_.size(); ++i) {
    for (uint32_t child : children_[i]) {
      json record{{"type", "edge"}, {"hypernym", names_[i]}, {"hyponym", names_[child]}};
      out << record.dump() << "\n";
    }
  }
  return out.str();
}

LexicalGraph parse_graph(std::istream& source) {
  LexicalGraph graph;
  for_each_jsonl(
      source,
      [&](size_t line_no, const json& record) {
        const auto fail = [&](const std::string& why) {
          throw MalformedLine("line " + std::to_string(line_no) + ": " + why);
        };
        if (!record.is_object() || !record.contains("type")) fail("missing type");
        const std::string type = record.value("type", "");
        if (type == "synset") {
          if (!record.contains("id") || !record["id"].is_string()) fail("synset without id");
          const std::string id = record["id"].get<std::string>();
          if (!valid_synset_id(id)) fail("bad synset id: " + id);
          if (graph.contains(id)) fail("duplicate synset: " + id);
          const uint32_t idx = graph.add_node(id);
          if (record.contains("lemmas")) {
            if (!record["lemmas"].is_array()) fail("lemmas must be an array");
            for (const auto& lemma : record["lemmas"]) {
              if (!lemma.is_string()) fail("lemma must be a string");
              graph.add_lemma(idx, lemma.get<std::string>());
            }
          }
        } else if (type == "edge") {
          if (!record.contains("hypernym") || !record.contains("hyponym")) {
            fail("edge without endpoints");
          }
          const std::string hyper = record["hypernym"].get<std::string>();
          const std::string hypo = record["hyponym"].get<std::string>();
          if (!graph.contains(hyper)) {
            throw DanglingReference("line " + std::to_string(line_no) +
                                    ": edge references undeclared synset " + hyper);
          }
          if (!graph.contains(hypo)) {
            throw DanglingReference("line " + std::to_string(line_no) +
                                    ": edge references undeclared synset " + hypo);
          }
          graph.add_edge(graph.node_index(hyper), graph.node_index(hypo));
        } else {
          fail("unknown record type: " + type);
        }
      },
      [](size_t line_no, const std::string&) {
        throw MalformedLine("line " + std::to_string(line_no) + ": not valid JSON");
      });
  graph.finalize();
  return graph;
}

LexicalGraph parse_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedLine("cannot open graph file: " + path);
  return parse_graph(in);
}

std::set<std::string> descendants(const LexicalGraph& g, const std::string& synset) {
  const uint32_t start = g.node_index(synset);
  std::vector<bool> seen(g.node_count(), false);
  std::vector<uint32_t> frontier{start};
  seen[start] = true;
  std::set<std::string> out;
  while (!frontier.empty()) {
    const uint32_t node = frontier.back();
    frontier.pop_back();
    for (uint32_t child : g.children(node)) {
      if (seen[child]) continue;
      seen[child] = true;
      out.insert(g.node_name(child));
      frontier.push_back(child);
    }
  }
  return out;
}

WordGroupTable build_word_groups(const LexicalGraph& g) {
  // reverse topological accumulation: a node's group is its own lemmas plus
  // the union of its children's groups
  const size_t n = g.node_count();
  std::vector<std::set<std::string>> groups(n);

  // post-order via iterative DFS with memo
  std::vector<uint8_t> state(n, 0);
  for (uint32_t root = 0; root < n; ++root) {
    if (state[root] == 2) continue;
    std::vector<std::pair<uint32_t, size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [node, next_child] = stack.back();
      if (next_child < g.children(node).size()) {
        const uint32_t child = g.children(node)[next_child++];
        if (state[child] == 0) {
          state[child] = 1;
          stack.emplace_back(child, 0);
        }
      } else {
        auto& group = groups[node];
        group = g.lemmas(node);
        for (uint32_t child : g.children(node)) {
          group.insert(groups[child].begin(), groups[child].end());
        }
        state[node] = 2;
        stack.pop_back();
      }
    }
  }

  WordGroupTable table;
  for (uint32_t i = 0; i < n; ++i) table[g.node_name(i)] = std::move(groups[i]);
  return table;
}

InvertedWordGroupTable build_inverted_table(const WordGroupTable& table) {
  InvertedWordGroupTable inverted;
  for (const auto& [synset, group] : table) {
    for (const auto& word : group) inverted[word].insert(synset);
  }
  return inverted;
}

LexicalGraph random_dag(const RandomDagConfig& config) {
  Rng rng(config.seed);
  LexicalGraph graph;
  std::vector<uint32_t> ids;
  ids.reserve(config.n_nodes);
  for (size_t i = 0; i < config.n_nodes; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "node%04zu.n.01", i);
    ids.push_back(graph.add_node(name));
  }
  for (size_t i = 1; i < config.n_nodes; ++i) {
    const size_t n_parents = rng.index(config.max_parents + 1);
    for (size_t p = 0; p < n_parents; ++p) {
      graph.add_edge(ids[rng.index(i)], ids[i]);  // parent index < i keeps it acyclic
    }
  }
  for (size_t i = 0; i < config.n_nodes; ++i) {
    const size_t n_lemmas = rng.index(config.max_lemmas + 1);
    for (size_t l = 0; l < n_lemmas; ++l) {
      char word[16];
      std::snprintf(word, sizeof(word), "w%03zu", rng.index(config.vocab_size));
      graph.add_lemma(ids[i], word);
    }
  }
  graph.finalize();
  return graph;
}

}  // namespace taskdisc::lex
