// Copyright 2026 The DGform Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DGFORM_COMMON_RNG_H_
#define DGFORM_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace dgform {

// Seeded generator with a serializable state. Normal draws use Box-Muller so
// that sequences do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // uniform in [0, 1)
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();
  // uniform integer in [0, n)
  std::uint64_t Index(std::uint64_t n);

  std::string SaveState() const;
  void LoadState(const std::string& state);

  // Derive an independent stream from a parent seed and a stream id.
  static std::uint64_t Derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dgform

#endif  // DGFORM_COMMON_RNG_H_
