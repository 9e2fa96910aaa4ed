#include "vocab/ark.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vocab::ark {

namespace {

bool ieq_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) return false;
  }
  return true;
}

bool is_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

int ordinal(char c) noexcept {
  auto pos = kAlphabet.find(c);
  return pos == std::string_view::npos ? 0 : static_cast<int>(pos);
}

bool in_alphabet(char c) noexcept { return kAlphabet.find(c) != std::string_view::npos; }

std::string ArkId::to_string() const {
  std::string out = "ark:/" + naan + "/" + name + qualifier;
  if (inflection == Inflection::Brief) out += "?";
  if (inflection == Inflection::Full) out += "??";
  return out;
}

ArkId ArkId::base() const { return ArkId{naan, name, {}, Inflection::None}; }

ArkId parse(std::string_view text) {
  std::string_view rest = text;
  if (ieq_prefix(rest, "http://") || ieq_prefix(rest, "https://")) {
    rest.remove_prefix(rest.find("//") + 2);
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) {
      throw InvalidArk("no path after host in '" + std::string(text) + "'");
    }
    rest.remove_prefix(slash);
  }
  if (!rest.empty() && rest.front() == '/') rest.remove_prefix(1);
  if (!ieq_prefix(rest, "ark:")) {
    throw InvalidArk("missing 'ark:' label in '" + std::string(text) + "'");
  }
  rest.remove_prefix(4);
  if (!rest.empty() && rest.front() == '/') rest.remove_prefix(1);

  ArkId id;
  std::size_t marks = 0;
  while (marks < rest.size() && rest[rest.size() - 1 - marks] == '?') ++marks;
  if (marks > 2) throw InvalidArk("too many '?' inflection marks");
  id.inflection = marks == 0 ? Inflection::None : marks == 1 ? Inflection::Brief : Inflection::Full;
  rest.remove_suffix(marks);

  auto slash = rest.find('/');
  if (slash == std::string_view::npos) throw InvalidArk("missing '/' after NAAN");
  id.naan = std::string(rest.substr(0, slash));
  if (id.naan.empty()) throw InvalidArk("empty NAAN");
  if (!is_digits(id.naan)) throw InvalidArk("NAAN must be digits: '" + id.naan + "'");
  rest.remove_prefix(slash + 1);

  auto end = rest.find_first_of("/.");
  std::string_view name = rest.substr(0, end);
  if (name.empty()) throw InvalidArk("empty name");
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') {
      throw InvalidArk(std::string("illegal character '") + c + "' in name");
    }
  }
  id.name = std::string(name);
  if (end != std::string_view::npos) id.qualifier = std::string(rest.substr(end));
  if (id.qualifier.find('?') != std::string::npos) {
    throw InvalidArk("'?' inside qualifier");
  }
  return id;
}

ArkId normalize(const ArkId& id) {
  ArkId out = id;
  out.naan = lower(id.naan);
  out.name.clear();
  for (char c : lower(id.name)) {
    if (c != '-') out.name.push_back(c);
  }
  return out;
}

ArkId parse_normalized(std::string_view text) { return normalize(parse(text)); }

char check_char(std::string_view naan, std::string_view body) {
  std::string s;
  s.reserve(naan.size() + 1 + body.size());
  s.append(naan).append("/").append(body);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += static_cast<std::uint64_t>(ordinal(s[i])) * (i + 1);
  }
  return kAlphabet[sum % kRadix];
}

Validation validate(const ArkId& id, ValidationMode mode) {
  Validation v;
  auto fail = [&v](std::string reason) {
    v.ok = false;
    v.reasons.push_back(std::move(reason));
  };
  if (!is_digits(id.naan)) fail("NAAN '" + id.naan + "' is not a non-empty digit string");
  if (id.name.empty()) fail("name is empty");
  for (char c : id.name) {
    if (c == '/' || c == '?' || c == '-') {
      fail(std::string("name contains '") + c + "'");
    } else if (!in_alphabet(c)) {
      fail(std::string("name character '") + c + "' is outside the betanumeric alphabet");
    }
  }
  if (mode == ValidationMode::Strict && v.ok) {
    if (id.name.size() < 2) {
      fail("name too short to carry a check character");
    } else {
      std::string_view body(id.name.data(), id.name.size() - 1);
      char expected = check_char(id.naan, body);
      if (expected != id.name.back()) {
        fail(std::string("check character mismatch: expected '") + expected + "', found '" +
             id.name.back() + "'");
      }
    }
  }
  return v;
}

std::uint64_t MinterState::capacity() const {
  std::uint64_t cap = 1;
  for (int i = 0; i < bladeLength; ++i) cap *= kRadix;
  return cap;
}

std::pair<ArkId, MinterState> mint(const MinterState& state) {
  if (state.bladeLength < 1 || state.bladeLength > 12) {
    throw Error("blade length must be within 1..12");
  }
  const std::uint64_t cap = state.capacity();
  if (state.counter >= cap) {
    throw MinterExhausted("minter exhausted after " + std::to_string(cap) + " ids");
  }
  auto value = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(MinterState::kMultiplier) * state.counter +
       MinterState::kOffset) %
      cap);
  std::string blade(static_cast<std::size_t>(state.bladeLength), kAlphabet[0]);
  for (auto it = blade.rbegin(); it != blade.rend() && value > 0; ++it) {
    *it = kAlphabet[value % kRadix];
    value /= kRadix;
  }
  std::string body = state.prefix + blade;
  ArkId id{state.naan, body + check_char(state.naan, body), {}, Inflection::None};
  MinterState next = state;
  ++next.counter;
  return {std::move(id), next};
}

MinterState load_minter_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read minter state " + path.string());
  MinterState state;
  try {
    auto j = nlohmann::json::parse(in);
    state.naan = j.at("naan").get<std::string>();
    state.prefix = j.at("prefix").get<std::string>();
    state.bladeLength = j.at("bladeLength").get<int>();
    state.counter = j.at("counter").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid minter state " + path.string() + ": " + e.what());
  }
  if (!is_digits(state.naan)) throw Error("minter state NAAN must be digits");
  for (char c : state.prefix) {
    if (!in_alphabet(c)) throw Error("minter prefix must use the betanumeric alphabet");
  }
  if (state.bladeLength < 1 || state.bladeLength > 12) {
    throw Error("minter bladeLength must be within 1..12");
  }
  if (state.counter > state.capacity()) throw Error("minter counter beyond capacity");
  return state;
}

void save_minter_state(const std::filesystem::path& path, const MinterState& state) {
  nlohmann::json j = {{"naan", state.naan},
                      {"prefix", state.prefix},
                      {"bladeLength", state.bladeLength},
                      {"counter", state.counter}};
  const std::string data = j.dump(2) + "\n";
  const std::filesystem::path tmp = path.string() + ".tmp";

  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw Error("cannot write " + tmp.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < data.size()) {
    ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error("write failed for " + tmp.string() + ": " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    throw Error("fsync failed for " + tmp.string() + ": " + std::strerror(errno));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename to " + path.string() + " failed: " + ec.message());

  // Persist the rename itself.
  auto dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

}  // namespace vocab::ark
