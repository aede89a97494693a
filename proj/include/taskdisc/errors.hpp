#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace taskdisc {

// Base for all library errors. `code()` is a stable machine-readable tag that
// the CLI surfaces as JSON on stderr, `module()` names the subsystem it came
// from.
class Error : public std::runtime_error {
public:
  Error(std::string code, std::string module, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)), module_(std::move(module)) {}
  const std::string& code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

private:
  std::string code_;
  std::string module_;
};

#define TASKDISC_ERROR(Name, Module)                                        \
  struct Name : Error {                                                     \
    explicit Name(const std::string& what) : Error(#Name, Module, what) {}  \
  }

// lexical_graph
TASKDISC_ERROR(CycleDetected, "lexical_graph");
TASKDISC_ERROR(DanglingReference, "lexical_graph");
TASKDISC_ERROR(MalformedLine, "lexical_graph");
TASKDISC_ERROR(UnknownSynset, "lexical_graph");

// task_discovery
TASKDISC_ERROR(AnswerNotInDescription, "task_discovery");
TASKDISC_ERROR(AnswerUnknownToTaxonomy, "task_discovery");

// corpus
TASKDISC_ERROR(EmptySplit, "corpus");
TASKDISC_ERROR(UnknownAnswer, "corpus");
TASKDISC_ERROR(ConfigInvalid, "corpus");
TASKDISC_ERROR(MalformedRecord, "corpus");
TASKDISC_ERROR(RegionOutOfBounds, "corpus");
TASKDISC_ERROR(GroundTruthCountMismatch, "corpus");

// neural
TASKDISC_ERROR(ShapeMismatch, "neural");
TASKDISC_ERROR(UnknownTokenId, "neural");
TASKDISC_ERROR(EmptySequence, "neural");
TASKDISC_ERROR(NameMismatch, "neural");

// model
TASKDISC_ERROR(ThetaNotFrozen, "model");
TASKDISC_ERROR(MissingAnswerEmbedding, "model");
TASKDISC_ERROR(VocabularyMisaligned, "model");

// eval
TASKDISC_ERROR(DimensionMismatch, "eval");

// cli
TASKDISC_ERROR(MissingInput, "cli");

#undef TASKDISC_ERROR

}  // namespace taskdisc
