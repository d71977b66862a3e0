#pragma once

#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hits/focal.hpp"

namespace hits {

struct Slice {
  int index = 0;  // 1-based
  std::string description;
  std::string recited_code;
  int first_line = 0;  // within the focal method's source file
  int last_line = 0;
};

enum class SliceOrigin { Llm, Fallback };

struct SlicePlan {
  std::string focal;  // qualified name
  std::vector<Slice> slices;
  SliceOrigin origin = SliceOrigin::Llm;
};

/// Raw decomposition as decoded from an LLM payload, before span
/// resolution.
struct RawSlice {
  int index = 0;
  std::string description;
  std::string code;
};

struct RawSlicePlan {
  std::string summary;
  std::vector<RawSlice> slices;
};

struct SliceValidationError {
  enum class Kind { UnlocatableSegment, Overlap, Gap, EmptyPlan };
  Kind kind;
  int slice_index = 0;  // offending slice, 1-based (0 for empty_plan)
  std::string message;
};

/// Locate each recited segment in the focal source by whitespace-normalized
/// line matching; require ordered, non-overlapping spans that jointly cover
/// every executable line.
std::variant<SlicePlan, SliceValidationError> validate_slice_plan(
    const RawSlicePlan& raw, const FocalMethod& focal,
    const minilang::FunctionDecl& fn);

/// Deterministic fallback: group top-level statements greedily, closing a
/// group once its accumulated decision count reaches the target. Never
/// splits inside a compound statement.
SlicePlan fallback_slice(const FocalMethod& focal,
                         const minilang::FunctionDecl& fn,
                         int target_decisions_per_slice);

struct SliceComplexityEstimate {
  std::vector<boost::multiprecision::cpp_int> per_slice_conditions;
  boost::multiprecision::cpp_int sum = 0;
  boost::multiprecision::cpp_int product = 1;
};

/// n_i = max(1, 2^decisions-in-slice) with the exponent capped at 20.
SliceComplexityEstimate estimate_conditions(const SlicePlan& plan,
                                            const minilang::FunctionDecl& fn);

/// Sum/product over explicit counts (used by the exhaustive property check).
SliceComplexityEstimate estimate_from_counts(
    const std::vector<long long>& counts);

std::string normalize_ws_line(const std::string& line);

}  // namespace hits
