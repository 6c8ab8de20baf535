#pragma once

#include "guirl/curriculum/templates.hpp"

namespace guirl::curriculum {

// Expert action sequence for a generated task, computed against a scratch
// environment and ending with TERMINATE. Throws if any emitted action is
// rejected (which would indicate a generator/solver inconsistency).
std::vector<core::Action> solve_task(const GeneratedTask& task,
                                     const simenv::AppRegistry& apps,
                                     const simenv::ContextRegistry& contexts,
                                     const core::SymbolTable& symbols);

}  // namespace guirl::curriculum
