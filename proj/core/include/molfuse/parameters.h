// Copyright 2026 The Molfuse Authors.
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
#ifndef MOLFUSE_PARAMETERS_H_
#define MOLFUSE_PARAMETERS_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "molfuse/rng.h"
#include "molfuse/tensor.h"

namespace molfuse {

inline constexpr char kCheckpointVersion[] = "molfuse-v1";

enum class ParamKind {
  kWeight,     // Glorot-uniform initialised, L2-decayed.
  kBias,       // Zero initialised, L2-decayed.
  kEmbedding,  // Uniform in [-0.05, 0.05], excluded from L2.
};

struct Parameter {
  std::string name;
  Tensor value;
  ParamKind kind = ParamKind::kWeight;
};

// Named trainable tensors in registration order. Handles are shared, so a
// Tensor returned by Add() stays bound to the stored value.
class ParameterSet {
 public:
  // Registers a freshly initialised parameter. Names must be unique.
  Tensor Add(const std::string& name, Shape shape, ParamKind kind, Rng& rng);
  // Registers an existing tensor (must require grad).
  Tensor Adopt(const std::string& name, Tensor value, ParamKind kind);

  const Tensor& Get(const std::string& name) const;
  bool Contains(const std::string& name) const;

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  size_t size() const { return params_.size(); }

  void ZeroGrad();
  // Deep copy: new tensors with the same values.
  ParameterSet Clone() const;
  // Copies values from other (same names and shapes) into this set's tensors.
  void CopyValuesFrom(const ParameterSet& other);
  bool ValuesEqual(const ParameterSet& other) const;

  nlohmann::ordered_json ToJson() const;
  // Overwrites the values of registered parameters from json; every
  // registered name must be present with a matching shape.
  void LoadJson(const nlohmann::ordered_json& json);

 private:
  std::vector<Parameter> params_;
  std::map<std::string, size_t> index_;
};

// Writes {"version": "molfuse-v1", "metadata": ..., "parameters": [...]}.
void SaveCheckpoint(const std::string& path, const ParameterSet& params,
                    const nlohmann::ordered_json& metadata);
// Reads a checkpoint file, validating the version tag. Throws DataError.
nlohmann::ordered_json ReadCheckpoint(const std::string& path);

}  // namespace molfuse

#endif  // MOLFUSE_PARAMETERS_H_
