#include "vrdrelex/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

namespace {

constexpr char kMagic[8] = {'V', 'R', 'L', 'X', 'C', 'K', 'P', 'T'};

nlohmann::json model_config_to_json(const ModelConfig& m) {
  return nlohmann::json{{"word_dim", m.word_dim},
                        {"label_dim", m.label_dim},
                        {"gcn_dim", m.gcn_dim},
                        {"role_dim", m.role_dim},
                        {"geom_dim", m.geom_dim},
                        {"leaky_slope", m.leaky_slope},
                        {"signed_offsets", m.signed_offsets},
                        {"freeze_feature_scorer", m.freeze_feature_scorer},
                        {"binary_threshold", m.binary_threshold},
                        {"external_dim", m.external_dim},
                        {"mode", to_string(m.mode)},
                        {"label_source", to_string(m.label_source)}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig m;
  m.word_dim = j.at("word_dim").get<std::size_t>();
  m.label_dim = j.at("label_dim").get<std::size_t>();
  m.gcn_dim = j.at("gcn_dim").get<std::size_t>();
  m.role_dim = j.at("role_dim").get<std::size_t>();
  m.geom_dim = j.at("geom_dim").get<std::size_t>();
  m.leaky_slope = j.at("leaky_slope").get<double>();
  m.signed_offsets = j.at("signed_offsets").get<bool>();
  m.freeze_feature_scorer = j.at("freeze_feature_scorer").get<bool>();
  m.binary_threshold = j.at("binary_threshold").get<double>();
  m.external_dim = j.at("external_dim").get<std::size_t>();
  m.mode = decoder_mode_from_string(j.at("mode").get<std::string>());
  m.label_source = label_source_from_string(j.at("label_source").get<std::string>());
  return m;
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::string& what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("checkpoint truncated while reading " + what);
  return v;
}

std::uint64_t fnv_bytes(const std::string& a, const std::string& b) {
  return fnv1a64(b, fnv1a64(a));
}

}  // namespace

void save_checkpoint(const Model& model, const TrainConfig& train_config,
                     const std::filesystem::path& path) {
  const auto params = model.named_params();

  nlohmann::json tensors = nlohmann::json::array();
  std::string payload;
  for (const auto& [name, t] : params) {
    tensors.push_back({{"name", name}, {"shape", t.shape()}});
    const auto& v = t.values();
    const std::size_t bytes = v.size() * sizeof(double);
    const std::size_t off = payload.size();
    payload.resize(off + bytes);
    std::memcpy(payload.data() + off, v.data(), bytes);
  }

  std::vector<std::string> real_labels(model.labels().names().begin() + 1,
                                       model.labels().names().end());
  nlohmann::json header{{"format_version", kCheckpointVersion},
                        {"model_config", model_config_to_json(model.config())},
                        {"train_config", to_json(train_config)},
                        {"labels", real_labels},
                        {"vocab", model.vocab().tokens()},
                        {"tensors", tensors}};
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kCheckpointVersion);
  write_raw(out, static_cast<std::uint64_t>(header_str.size()));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  write_raw(out, static_cast<std::uint64_t>(payload.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  write_raw(out, fnv_bytes(header_str, payload));
  if (!out) throw ParseError("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(path.string() + " is not a checkpoint (bad magic)");
  }
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint version " + std::to_string(version) + ", this build reads " +
                     std::to_string(kCheckpointVersion));
  }
  const auto header_len = read_raw<std::uint64_t>(in, "header length");
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw ParseError("checkpoint truncated in header");
  const auto payload_len = read_raw<std::uint64_t>(in, "payload length");
  std::string payload(payload_len, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload_len));
  if (!in) throw ParseError("checkpoint truncated in payload");
  const auto stored_sum = read_raw<std::uint64_t>(in, "checksum");
  if (stored_sum != fnv_bytes(header_str, payload)) {
    throw ParseError("checkpoint checksum mismatch: " + path.string() + " is corrupt");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint header is not valid JSON: " + std::string(e.what()));
  }
  const ModelConfig mcfg = model_config_from_json(header.at("model_config"));
  const TrainConfig tcfg = train_config_from_json(header.at("train_config"));
  LabelSet labels(header.at("labels").get<std::vector<std::string>>());
  Vocabulary vocab = Vocabulary::from_tokens(header.at("vocab").get<std::vector<std::string>>());

  LoadedCheckpoint loaded{Model(mcfg, std::move(labels), std::move(vocab), /*seed=*/0), tcfg};

  auto params = loaded.model.named_params();
  std::size_t off = 0;
  const auto& tensors = header.at("tensors");
  if (tensors.size() != params.size()) {
    throw ParseError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model has " +
                     std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string name = tensors[i].at("name").get<std::string>();
    const Shape shape = tensors[i].at("shape").get<Shape>();
    auto& [pname, tensor] = params[i];
    if (name != pname || shape != tensor.shape()) {
      throw ParseError("checkpoint tensor " + name + shape_str(shape) + " does not match model " +
                       pname + shape_str(tensor.shape()));
    }
    const std::size_t bytes = tensor.size() * sizeof(double);
    if (off + bytes > payload.size()) throw ParseError("checkpoint payload too short");
    std::memcpy(tensor.values().data(), payload.data() + off, bytes);
    off += bytes;
  }
  if (off != payload.size()) throw ParseError("checkpoint payload has trailing bytes");
  return loaded;
}

}  // namespace vrdrelex
