#pragma once
// Exact oracle suite: model-operator constants and identities with known
// closed values, shared by the command-line selftest and the acceptance run.

#include <vector>

#include "bergman/geometry.hpp"

namespace bergman {

// Every check compares two exact values; `ok` means structural equality.
std::vector<CheckResult> oracle_suite();

}  // namespace bergman
