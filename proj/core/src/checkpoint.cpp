// Copyright 2026 The infofuse Authors
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

#include "infofuse/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace infofuse {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::runtime_error(what_ + ": file is truncated");
    char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  void expect_magic(std::string_view magic) {
    if (bytes_.compare(0, magic.size(), magic) != 0) {
      throw std::runtime_error(fmt::format("{}: missing '{}' magic", what_, magic));
    }
    pos_ = magic.size();
  }

  Vector doubles(std::uint64_t n) {
    if (n > (bytes_.size() - pos_) / sizeof(double)) throw std::runtime_error(what_ + ": file is truncated");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = get<double>();
    return v;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw std::runtime_error(what_ + ": trailing bytes");
  }

 private:
  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(fmt::format("write failed: {}", path.string()));
}

fs::path node_file(const fs::path& dir, int j, std::string_view ext) {
  return dir / fmt::format("node_{}{}", j + 1, ext);
}

}  // namespace

std::string serialize_model(const DifnetModel& model) {
  const DifnetShape& s = model.shape();
  std::string out = "DIFN";
  put<std::uint32_t>(out, kModelFormatVersion);
  for (int v : {s.m, s.sensors, s.h1, s.h2, s.h3}) put<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(model.input_scale().size()));
  for (Eigen::Index i = 0; i < model.input_scale().size(); ++i) put<double>(out, model.input_scale()(i));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(model.params().size()));
  for (Eigen::Index i = 0; i < model.params().size(); ++i) put<double>(out, model.params()(i));
  return out;
}

DifnetModel deserialize_model(const std::string& bytes) {
  Reader r(bytes, "model file");
  r.expect_magic("DIFN");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw std::runtime_error(fmt::format("model file: unsupported format version {}", version));
  }
  DifnetShape s;
  s.m = static_cast<int>(r.get<std::uint32_t>());
  s.sensors = static_cast<int>(r.get<std::uint32_t>());
  s.h1 = static_cast<int>(r.get<std::uint32_t>());
  s.h2 = static_cast<int>(r.get<std::uint32_t>());
  s.h3 = static_cast<int>(r.get<std::uint32_t>());
  DifnetModel model(s);
  const auto n_scale = r.get<std::uint64_t>();
  if (n_scale != static_cast<std::uint64_t>(s.input_dim())) throw std::runtime_error("model file: input scale size mismatch");
  model.input_scale() = r.doubles(n_scale);
  const auto n_params = r.get<std::uint64_t>();
  if (n_params != static_cast<std::uint64_t>(s.num_params())) {
    throw std::runtime_error(fmt::format("model file: {} parameters, shape needs {}", n_params, s.num_params()));
  }
  model.params() = r.doubles(n_params);
  r.expect_end();
  return model;
}

void save_model(const fs::path& path, const DifnetModel& model) { write_file(path, serialize_model(model)); }

DifnetModel load_model(const fs::path& path) {
  try {
    return deserialize_model(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_optimizer(const fs::path& path, const AdamState& s) {
  std::string out = "DFNA";
  put<std::uint32_t>(out, 1);
  put<std::int64_t>(out, s.step);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(s.m.size()));
  for (Eigen::Index i = 0; i < s.m.size(); ++i) put<double>(out, s.m(i));
  for (Eigen::Index i = 0; i < s.v.size(); ++i) put<double>(out, s.v(i));
  write_file(path, out);
}

AdamState load_optimizer(const fs::path& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path.string());
  r.expect_magic("DFNA");
  if (r.get<std::uint32_t>() != 1) throw std::runtime_error(path.string() + ": unsupported optimizer version");
  AdamState s;
  s.step = r.get<std::int64_t>();
  const auto n = r.get<std::uint64_t>();
  s.m = r.doubles(n);
  s.v = r.doubles(n);
  r.expect_end();
  return s;
}

void save_models(const fs::path& dir, const std::vector<DifnetModel>& models) {
  for (std::size_t j = 0; j < models.size(); ++j) save_model(node_file(dir, static_cast<int>(j), ".difn"), models[j]);
}

std::vector<DifnetModel> load_models(const fs::path& dir, int count) {
  std::vector<DifnetModel> out;
  for (int j = 0; j < count; ++j) out.push_back(load_model(node_file(dir, j, ".difn")));
  return out;
}

void write_manifest(const fs::path& path, const std::map<std::string, std::string>& entries) {
  std::string text;
  for (const auto& [k, v] : entries) text += fmt::format("{} = {}\n", k, v);
  write_file(path, text);
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::string loss_csv(const std::vector<LossRecord>& history) {
  std::string out = "epoch,node,train_loss,cv_loss,penalty\n";
  for (const auto& r : history) {
    out += fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", r.epoch, r.node, r.train_loss, r.cv_loss, r.penalty);
  }
  return out;
}

void save_training(const fs::path& dir, const TrainingState& st, const std::map<std::string, std::string>& manifest) {
  save_models(dir / "models", st.best_models);
  auto m = manifest;
  m["best_epoch"] = std::to_string(st.best_epoch);
  m["epochs_completed"] = std::to_string(st.epoch);
  write_manifest(dir / "models" / "manifest.txt", m);

  const fs::path ck = dir / "checkpoint";
  save_models(ck, st.models);
  for (std::size_t j = 0; j < st.optimizers.size(); ++j) {
    save_optimizer(node_file(ck, static_cast<int>(j), ".adam"), st.optimizers[j]);
  }
  nlohmann::ordered_json js;
  js["epoch"] = st.epoch;
  js["best_epoch"] = st.best_epoch;
  js["best_cv"] = st.best_cv;
  js["skipped_trajectories"] = st.skipped_trajectories;
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& r : st.history) hist.push_back({r.epoch, r.node, r.train_loss, r.cv_loss, r.penalty});
  js["history"] = std::move(hist);
  write_file(ck / "state.json", js.dump(1) + "\n");
  write_file(dir / "loss.csv", loss_csv(st.history));
}

TrainingState load_training(const fs::path& dir, int nodes) {
  const fs::path ck = dir / "checkpoint";
  TrainingState st;
  st.models = load_models(ck, nodes);
  st.best_models = load_models(dir / "models", nodes);
  for (int j = 0; j < nodes; ++j) st.optimizers.push_back(load_optimizer(node_file(ck, j, ".adam")));
  try {
    const auto js = nlohmann::json::parse(read_file(ck / "state.json"));
    st.epoch = js.at("epoch").get<int>();
    st.best_epoch = js.at("best_epoch").get<int>();
    st.best_cv = js.at("best_cv").get<double>();
    st.skipped_trajectories = js.at("skipped_trajectories").get<int>();
    for (const auto& r : js.at("history")) {
      st.history.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<double>(), r.at(3).get<double>(),
                            r.at(4).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", (ck / "state.json").string(), e.what()));
  }
  return st;
}

}  // namespace infofuse
