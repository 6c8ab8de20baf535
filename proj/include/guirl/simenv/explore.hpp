#pragma once

#include <cstdint>

#include "guirl/core/symbols.hpp"
#include "guirl/core/types.hpp"
#include "guirl/simenv/env.hpp"

namespace guirl::simenv {

// Seeded random walk over the currently enabled widgets; produces the raw
// environment experience used to bootstrap task generation. The walk picks
// uniformly among legal non-terminate actions, never repeating the previous
// (kind, target) pair, and runs for exactly `budget` steps.
core::Trajectory explore(SimEnv& env, const core::SymbolTable& symbols,
                         const std::string& context_id, int budget, std::uint64_t seed);

// Scripted read-only traversal of every content-bearing screen. Aborts with
// ContractViolation if the plan ever mutates the document or fails to return
// to the initial state.
core::Trajectory review_context(SimEnv& env, const core::SymbolTable& symbols,
                                const std::string& context_id, std::uint64_t seed);

}  // namespace guirl::simenv
