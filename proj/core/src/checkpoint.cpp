#include "tomita/checkpoint.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace tomita {
namespace {

using nlohmann::json;

json vector_json(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

StateVector vector_from(const json& j) {
  StateVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

std::string checkpoint_to_json(const RnnModel& model) {
  json j;
  j["format"] = "tomita-rnn-checkpoint";
  j["version"] = 1;
  j["kind"] = std::string(to_string(model.kind()));
  j["hidden_size"] = model.hidden_size();
  j["seed"] = model.seed();
  j["h0"] = vector_json(model.initial_state().h);
  if (model.kind() == CellKind::lstm) j["c0"] = vector_json(model.initial_state().c);
  json tensors = json::array();
  for (const auto& t : model.parameters()) {
    tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"values", t.values}});
  }
  j["parameters"] = std::move(tensors);
  return j.dump(1) + "\n";
}

RnnModel checkpoint_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "tomita-rnn-checkpoint") throw IoError("not a tomita checkpoint");
    const CellKind kind = parse_cell_kind(j.at("kind").get<std::string>());
    CellState initial;
    initial.h = vector_from(j.at("h0"));
    if (kind == CellKind::lstm) initial.c = vector_from(j.at("c0"));
    std::vector<Tensor> params;
    for (const auto& t : j.at("parameters")) {
      params.push_back({t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>(),
                        t.at("values").get<std::vector<double>>()});
    }
    return RnnModel(kind, j.at("hidden_size").get<std::size_t>(), j.at("seed").get<std::uint64_t>(),
                    std::move(params), std::move(initial));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  } catch (const InputError& e) {
    throw IoError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

void save_checkpoint(const RnnModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_to_json(model));
}

RnnModel load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_file(path));
}

}  // namespace tomita
