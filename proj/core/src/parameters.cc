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
#include "molfuse/parameters.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "molfuse/errors.h"

namespace molfuse {

namespace {

const char* KindName(ParamKind kind) {
  switch (kind) {
    case ParamKind::kWeight: return "weight";
    case ParamKind::kBias: return "bias";
    case ParamKind::kEmbedding: return "embedding";
  }
  return "weight";
}

}  // namespace

Tensor ParameterSet::Add(const std::string& name, Shape shape, ParamKind kind,
                         Rng& rng) {
  const int64_t n = NumElements(shape);
  std::vector<double> values(n, 0.0);
  switch (kind) {
    case ParamKind::kWeight: {
      // Glorot uniform; fan_out is the leading dimension.
      const double fan_out = static_cast<double>(shape.empty() ? 1 : shape[0]);
      const double fan_in = static_cast<double>(n) / std::max(fan_out, 1.0);
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : values) v = rng.Uniform(-limit, limit);
      break;
    }
    case ParamKind::kBias:
      break;
    case ParamKind::kEmbedding:
      for (double& v : values) v = rng.Uniform(-0.05, 0.05);
      break;
  }
  return Adopt(name, Tensor::FromData(std::move(shape), std::move(values), true),
               kind);
}

Tensor ParameterSet::Adopt(const std::string& name, Tensor value,
                           ParamKind kind) {
  if (index_.count(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  if (!value.requires_grad()) {
    throw std::invalid_argument("parameter " + name + " must require grad");
  }
  index_[name] = params_.size();
  params_.push_back({name, value, kind});
  return value;
}

const Tensor& ParameterSet::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter: " + name);
  }
  return params_[it->second].value;
}

bool ParameterSet::Contains(const std::string& name) const {
  return index_.count(name) > 0;
}

void ParameterSet::ZeroGrad() {
  for (Parameter& p : params_) p.value.ZeroGrad();
}

ParameterSet ParameterSet::Clone() const {
  ParameterSet copy;
  for (const Parameter& p : params_) copy.Adopt(p.name, p.value.Clone(), p.kind);
  return copy;
}

void ParameterSet::CopyValuesFrom(const ParameterSet& other) {
  for (Parameter& p : params_) {
    const Tensor& src = other.Get(p.name);
    if (src.shape() != p.value.shape()) {
      throw ShapeError("CopyValuesFrom: " + p.name + " has shape " +
                       ShapeToString(p.value.shape()) + ", source " +
                       ShapeToString(src.shape()));
    }
    std::copy(src.data().begin(), src.data().end(),
              p.value.mutable_data().begin());
  }
}

bool ParameterSet::ValuesEqual(const ParameterSet& other) const {
  if (other.size() != size()) return false;
  for (const Parameter& p : params_) {
    if (!other.Contains(p.name)) return false;
    const Tensor& q = other.Get(p.name);
    if (q.shape() != p.value.shape()) return false;
    const auto a = p.value.data();
    const auto b = q.data();
    for (size_t i = 0; i < a.size(); ++i) {
      // Bitwise comparison so that -0.0 and NaN payloads also count.
      if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    }
  }
  return true;
}

nlohmann::ordered_json ParameterSet::ToJson() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Parameter& p : params_) {
    nlohmann::ordered_json entry;
    entry["name"] = p.name;
    entry["kind"] = KindName(p.kind);
    entry["shape"] = p.value.shape();
    entry["values"] = std::vector<double>(p.value.data().begin(),
                                          p.value.data().end());
    out.push_back(std::move(entry));
  }
  return out;
}

void ParameterSet::LoadJson(const nlohmann::ordered_json& json) {
  std::map<std::string, const nlohmann::ordered_json*> by_name;
  for (const auto& entry : json) {
    by_name[entry.at("name").get<std::string>()] = &entry;
  }
  for (Parameter& p : params_) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      throw DataError("checkpoint is missing parameter " + p.name);
    }
    const auto shape = it->second->at("shape").get<Shape>();
    if (shape != p.value.shape()) {
      throw DataError("checkpoint parameter " + p.name + " has shape " +
                      ShapeToString(shape) + ", model expects " +
                      ShapeToString(p.value.shape()));
    }
    const auto values = it->second->at("values").get<std::vector<double>>();
    if (values.size() != static_cast<size_t>(p.value.size())) {
      throw DataError("checkpoint parameter " + p.name +
                      " has the wrong number of values");
    }
    std::copy(values.begin(), values.end(), p.value.mutable_data().begin());
  }
}

void SaveCheckpoint(const std::string& path, const ParameterSet& params,
                    const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json doc;
  doc["version"] = kCheckpointVersion;
  doc["metadata"] = metadata;
  doc["parameters"] = params.ToJson();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << doc.dump() << "\n";
  if (!out) throw DataError("failed writing checkpoint " + path);
}

nlohmann::ordered_json ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path + ": " + e.what());
  }
  if (!doc.contains("version") ||
      doc["version"] != std::string(kCheckpointVersion)) {
    throw DataError("checkpoint " + path + " lacks version tag " +
                    std::string(kCheckpointVersion));
  }
  return doc;
}

}  // namespace molfuse
