/* Copyright 2026 The gbloch Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Acceptance suite: one pass/fail line per criterion.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gbloch {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every criterion (or only those in `only`), printing one line each.
/// `threads` is forwarded to the Monte Carlo criterion.
std::vector<CriterionResult> run_acceptance(std::ostream& out, unsigned threads = 0, const std::vector<int>& only = {});

}  // namespace gbloch
