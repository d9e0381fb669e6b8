#include "rcn/checkpoint.hpp"

#include "rcn/format.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcn {

namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const std::uint64_t v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ckpt.spec.validate();
  if (ckpt.params.size() != param_count(ckpt.spec)) {
    throw std::invalid_argument("checkpoint parameters have length " +
                                std::to_string(ckpt.params.size()) + ", expected " +
                                std::to_string(param_count(ckpt.spec)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << to_string(ckpt.spec.kind) << " hidden=" << ckpt.spec.hidden_size
    << " layers=" << ckpt.spec.num_hidden_layers << " obs=" << ckpt.spec.obs_dim
    << " act=" << ckpt.spec.act_dim << " biases=" << (ckpt.spec.biases_enabled ? 1 : 0)
    << " seed=" << ckpt.seed << '\n';
  for (Eigen::Index i = 0; i < ckpt.params.size(); ++i) {
    f << format_g17(ckpt.params[i]) << '\n';
  }
  f.flush();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");

  std::string header;
  if (!std::getline(f, header)) throw std::runtime_error("'" + path + "': missing header");

  std::istringstream hs(header);
  std::string kind_token;
  if (!(hs >> kind_token)) throw std::runtime_error("'" + path + "': empty header");

  Checkpoint ckpt;
  ckpt.spec.kind = policy_kind_from_string(kind_token);

  std::string field;
  while (hs >> field) {
    const std::size_t eq = field.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("'" + path + "': malformed header field '" + field + "'");
    }
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      if (key == "hidden") {
        ckpt.spec.hidden_size = parse_int(value);
      } else if (key == "layers") {
        ckpt.spec.num_hidden_layers = parse_int(value);
      } else if (key == "obs") {
        ckpt.spec.obs_dim = parse_int(value);
      } else if (key == "act") {
        ckpt.spec.act_dim = parse_int(value);
      } else if (key == "biases") {
        const int b = parse_int(value);
        if (b != 0 && b != 1) throw std::invalid_argument("biases must be 0 or 1");
        ckpt.spec.biases_enabled = b == 1;
      } else if (key == "seed") {
        ckpt.seed = parse_u64(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("'" + path + "': bad header field '" + field + "': " + e.what());
    }
  }
  ckpt.spec.validate();

  const std::int64_t n = param_count(ckpt.spec);
  ckpt.params.resize(n);
  std::string line;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!std::getline(f, line)) {
      throw std::runtime_error("'" + path + "': expected " + std::to_string(n) +
                               " parameters, found " + std::to_string(i));
    }
    const char* begin = line.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
      throw std::runtime_error("'" + path + "': bad parameter on line " +
                               std::to_string(i + 2) + ": '" + line + "'");
    }
    ckpt.params[i] = v;
  }
  while (std::getline(f, line)) {
    if (!line.empty()) {
      throw std::runtime_error("'" + path + "': trailing data after " + std::to_string(n) +
                               " parameters");
    }
  }
  return ckpt;
}

}  // namespace rcn
