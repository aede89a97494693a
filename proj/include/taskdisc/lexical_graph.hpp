#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace taskdisc::lex {

// "lemma.pos.nn" with a lowercase pos tag and a two-digit sense number
bool valid_synset_id(const std::string& name);

// lowercase, collapse runs of whitespace to a single space, trim ends
std::string normalize_word(const std::string& word);

// Hypernym DAG over synsets. Nodes carry (possibly empty) lemma sets; edges
// point from the more general synset to the more specific one. Immutable
// after parse_graph / generation, safe for concurrent readers.
class LexicalGraph {
public:
  size_t node_count() const { return names_.size(); }
  size_t edge_count() const { return edge_count_; }

  bool contains(const std::string& synset) const { return index_.count(synset) != 0; }
  uint32_t node_index(const std::string& synset) const;  // throws UnknownSynset
  const std::string& node_name(uint32_t idx) const { return names_[idx]; }
  const std::vector<std::string>& node_names() const { return names_; }

  const std::vector<uint32_t>& children(uint32_t idx) const { return children_[idx]; }
  const std::set<std::string>& lemmas(uint32_t idx) const { return lemmas_[idx]; }
  const std::set<std::string>& lemmas(const std::string& synset) const {
    return lemmas_[node_index(synset)];
  }

  // construction surface used by the parser and by fixture generators;
  // validation happens in parse_graph / finalize
  uint32_t add_node(const std::string& synset);
  void add_lemma(uint32_t idx, const std::string& word);
  void add_edge(uint32_t hypernym, uint32_t hyponym);
  void finalize();  // throws CycleDetected naming one edge on a cycle

  std::string to_jsonl() const;  // serialization matching the parse format

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<std::vector<uint32_t>> children_;
  std::vector<std::set<std::string>> lemmas_;
  size_t edge_count_ = 0;
};

// map: task synset -> word group (the words under it, itself included)
using WordGroupTable = std::map<std::string, std::set<std::string>>;

// map: word -> every synset whose word group contains it
using InvertedWordGroupTable = std::map<std::string, std::set<std::string>>;

// Line format, one record per line, synsets before the edges that use them:
//   {"type":"synset","id":"color.n.01","lemmas":["red","blue"]}
//   {"type":"edge","hypernym":"entity.n.01","hyponym":"color.n.01"}
LexicalGraph parse_graph(std::istream& source);
LexicalGraph parse_graph_file(const std::string& path);

// proper descendants of s (s itself excluded)
std::set<std::string> descendants(const LexicalGraph& g, const std::string& synset);

WordGroupTable build_word_groups(const LexicalGraph& g);
InvertedWordGroupTable build_inverted_table(const WordGroupTable& table);

struct RandomDagConfig {
  size_t n_nodes = 500;
  size_t max_parents = 3;       // per node, drawn uniformly in [0, max]
  size_t vocab_size = 200;      // synthetic word inventory "w000".."w199"
  size_t max_lemmas = 3;        // per node, drawn uniformly in [0, max]
  uint64_t seed = 0;
};

// Acyclic by construction: node i may only be a parent of node j when i < j.
LexicalGraph random_dag(const RandomDagConfig& config);

}  // namespace taskdisc::lex
