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

// Acceptance suite runner; arguments select criteria by number.

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "gbloch/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto results = gbloch::run_acceptance(std::cout, 0, only);
  const bool ok = !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? 0 : 1;
}
