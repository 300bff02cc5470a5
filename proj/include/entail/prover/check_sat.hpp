#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entail/fol/clausify.hpp"
#include "entail/prover/finite_model.hpp"
#include "entail/prover/model_search.hpp"
#include "entail/prover/resolution.hpp"

namespace entail::prover {

struct ProverLimits {
  int max_domain = 4;
  std::size_t max_resolution_steps = 50'000;
  // Model search up to this size runs before a short resolution attempt of
  // `early_resolution_steps`; the larger domains and the full budget follow.
  int early_domain = 3;
  std::size_t early_resolution_steps = 2'000;
};

struct SatVerdict {
  enum class Status { Sat, Unsat, Undecided };

  Status status = Status::Undecided;
  std::optional<FiniteModel> model;       // Sat
  std::optional<Refutation> refutation;   // Unsat
  std::size_t proof_steps = 0;            // Unsat: clauses generated before the refutation
  std::string exhausted;                  // Undecided: which resource ran out

  bool sat() const { return status == Status::Sat; }
  bool unsat() const { return status == Status::Unsat; }
  bool undecided() const { return status == Status::Undecided; }

  static SatVerdict satisfiable(FiniteModel m, const std::vector<fol::Clause>& clauses) {
    if (!m.satisfies(clauses)) throw std::logic_error("model search returned a non-model");
    SatVerdict v;
    v.status = Status::Sat;
    v.model = std::move(m);
    return v;
  }
};

inline std::string_view status_name(SatVerdict::Status s) {
  switch (s) {
    case SatVerdict::Status::Sat: return "SAT";
    case SatVerdict::Status::Unsat: return "UNSAT";
    case SatVerdict::Status::Undecided: return "UNDECIDED";
  }
  return "?";
}

// Finite model search over domain sizes 1..max_domain, then resolution. A
// short resolution run is slotted in before the largest domains, where
// propositional search on unsatisfiable problems gets expensive.
// SAT carries a verified model, UNSAT a checked derivation of the empty clause.
inline SatVerdict check_sat(const std::vector<fol::Clause>& clauses, const ProverLimits& limits = {}) {
  auto unsat = [&](ResolutionResult& r) {
    if (!check_refutation(*r.refutation, clauses)) throw std::logic_error("resolution produced an invalid refutation");
    SatVerdict v;
    v.status = SatVerdict::Status::Unsat;
    v.refutation = std::move(r.refutation);
    v.proof_steps = r.generated;
    return v;
  };
  const int early = std::min(limits.early_domain, limits.max_domain);
  for (int n = 1; n <= early; ++n)
    if (auto m = find_model(clauses, n)) return SatVerdict::satisfiable(std::move(*m), clauses);
  bool saturated = false;
  if (early < limits.max_domain && limits.early_resolution_steps > 0) {
    auto r = refute(clauses, std::min(limits.early_resolution_steps, limits.max_resolution_steps));
    if (r.status == ResolutionResult::Status::Refuted) return unsat(r);
    saturated = r.status == ResolutionResult::Status::Saturated;
  }
  for (int n = early + 1; n <= limits.max_domain; ++n)
    if (auto m = find_model(clauses, n)) return SatVerdict::satisfiable(std::move(*m), clauses);

  SatVerdict v;
  if (!saturated) {
    auto r = refute(clauses, limits.max_resolution_steps);
    if (r.status == ResolutionResult::Status::Refuted) return unsat(r);
    saturated = r.status == ResolutionResult::Status::Saturated;
  }
  if (saturated)
    v.exhausted = "saturated without refutation; no model up to domain size " + std::to_string(limits.max_domain);
  else
    v.exhausted = "no model up to domain size " + std::to_string(limits.max_domain) + " and " +
                  std::to_string(limits.max_resolution_steps) + " resolution steps";
  return v;
}

}  // namespace entail::prover
