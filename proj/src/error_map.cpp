#include "axnn/error_map.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "axnn/errors.hpp"

namespace axnn {

std::string to_string(Signedness s) {
    return s == Signedness::Unsigned ? "unsigned" : "signed";
}

Signedness signedness_from_string(std::string_view s) {
    if (s == "unsigned") return Signedness::Unsigned;
    if (s == "signed") return Signedness::Signed;
    throw FormatError("unknown signedness '" + std::string(s) + "'");
}

ErrorMap::ErrorMap(std::string name, Signedness sig, std::vector<int32_t> errors, double energy_rel)
    : name_(std::move(name)), sig_(sig), errors_(std::move(errors)), energy_rel_(energy_rel) {
    if (name_.empty()) throw ConfigError("error map name must not be empty");
    for (char c : name_)
        if (!std::isgraph(static_cast<unsigned char>(c)) || c == '/')
            throw ConfigError("error map name '" + name_ + "' contains unusable characters");
    if (errors_.size() != kTableSize)
        throw ConfigError("error table must have " + std::to_string(kTableSize) + " entries, got " +
                          std::to_string(errors_.size()));
    if (!(energy_rel_ >= 0.0)) throw ConfigError("energy_rel must be >= 0");
}

bool ErrorMap::is_accurate() const {
    return std::all_of(errors_.begin(), errors_.end(), [](int32_t e) { return e == 0; });
}

ErrorMap accurate_map() {
    return ErrorMap("accurate", Signedness::Unsigned, std::vector<int32_t>(ErrorMap::kTableSize, 0), 1.0);
}

ErrorMap truncated_map(int dropped_lsbs, double energy_rel) {
    if (dropped_lsbs < 1 || dropped_lsbs > 7)
        throw ConfigError("truncated multiplier needs 1..7 dropped LSBs, got " +
                          std::to_string(dropped_lsbs));
    const int t = dropped_lsbs;
    std::vector<int32_t> e(ErrorMap::kTableSize);
    for (int x = 0; x < 256; ++x)
        for (int w = 0; w < 256; ++w) {
            int32_t approx = ((x >> t) * (w >> t)) << (2 * t);
            e[static_cast<size_t>(x) * 256 + w] = approx - x * w;
        }
    return ErrorMap("trunc" + std::to_string(t), Signedness::Unsigned, std::move(e), energy_rel);
}

namespace {

// Integer-exact Mitchell: with x = 2^k1 + m1 and w = 2^k2 + m2, the linear
// log approximation sums to k1 + k2 + m1/2^k1 + m2/2^k2 and the antilog
// evaluates to 2^(k1+k2) + m1*2^k2 + m2*2^k1 when the fractional parts sum
// below one, twice the cross term otherwise. All quantities stay integral.
int32_t mitchell_product(int x, int w) {
    if (x == 0 || w == 0) return 0;
    int k1 = 31 - __builtin_clz(static_cast<unsigned>(x));
    int k2 = 31 - __builtin_clz(static_cast<unsigned>(w));
    int m1 = x - (1 << k1);
    int m2 = w - (1 << k2);
    int64_t cross = static_cast<int64_t>(m1) * (1 << k2) + static_cast<int64_t>(m2) * (1 << k1);
    int64_t base = static_cast<int64_t>(1) << (k1 + k2);
    int64_t approx = cross < base ? base + cross : 2 * cross;
    return static_cast<int32_t>(approx);
}

}  // namespace

ErrorMap mitchell_map(double energy_rel) {
    std::vector<int32_t> e(ErrorMap::kTableSize);
    for (int x = 0; x < 256; ++x)
        for (int w = 0; w < 256; ++w)
            e[static_cast<size_t>(x) * 256 + w] = mitchell_product(x, w) - x * w;
    return ErrorMap("mitchell", Signedness::Unsigned, std::move(e), energy_rel);
}

void save_error_map(const ErrorMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    char header[160];
    std::snprintf(header, sizeof(header), "emap-v1 %s %d %s %.17g\n", map.name().c_str(), map.bits(),
                  to_string(map.signedness()).c_str(), map.energy_rel());
    out << header;
    const auto& tab = map.table();
    for (int x = 0; x < 256; ++x) {
        for (int w = 0; w < 256; ++w) {
            out << tab[static_cast<size_t>(x) * 256 + w];
            out << (w == 255 ? '\n' : ' ');
        }
    }
    if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

ErrorMap load_error_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open error map '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    size_t eol = text.find('\n');
    if (eol == std::string::npos) throw FormatError("missing header line in '" + path.string() + "'", 0);
    std::istringstream hdr(text.substr(0, eol));
    std::string tag, name, sig_str;
    int bits = 0;
    double energy = -1.0;
    if (!(hdr >> tag >> name >> bits >> sig_str >> energy) || tag != "emap-v1")
        throw FormatError("malformed emap header in '" + path.string() + "'", 0);
    std::string extra;
    if (hdr >> extra) throw FormatError("trailing tokens in emap header", 0);
    if (bits != 8) throw FormatError("unsupported bit width " + std::to_string(bits), 8);
    Signedness sig = signedness_from_string(sig_str);
    if (!(energy >= 0.0)) throw FormatError("energy_rel must be >= 0", 0);

    std::vector<int32_t> table;
    table.reserve(ErrorMap::kTableSize);
    const char* base = text.data();
    const char* p = base + eol + 1;
    const char* end = base + text.size();
    while (true) {
        while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
        if (p == end) break;
        if (table.size() == ErrorMap::kTableSize)
            throw FormatError("table has more than " + std::to_string(ErrorMap::kTableSize) + " entries",
                              p - base);
        int64_t value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec == std::errc::invalid_argument)
            throw FormatError("expected integer in error table", p - base);
        if (ec == std::errc::result_out_of_range || value > INT32_MAX || value < INT32_MIN)
            throw FormatError("error entry out of 32-bit signed range", p - base);
        table.push_back(static_cast<int32_t>(value));
        p = next;
    }
    if (table.size() != ErrorMap::kTableSize)
        throw FormatError("table has " + std::to_string(table.size()) + " entries, expected " +
                          std::to_string(ErrorMap::kTableSize),
                          static_cast<long long>(text.size()));
    return ErrorMap(name, sig, std::move(table), energy);
}

void MultiplierLibrary::add(ErrorMap map) {
    if (find(map.name())) throw ConfigError("duplicate multiplier name '" + map.name() + "'");
    if (!entries_.empty() && entries_.front()->signedness() != map.signedness())
        throw ConfigError("library mixes signed and unsigned multipliers");
    entries_.push_back(std::make_shared<const ErrorMap>(std::move(map)));
}

std::shared_ptr<const ErrorMap> MultiplierLibrary::find(std::string_view name) const {
    for (const auto& e : entries_)
        if (e->name() == name) return e;
    return nullptr;
}

MultiplierLibrary MultiplierLibrary::load_dir(const std::filesystem::path& dir) {
    std::ifstream idx(dir / "index.txt");
    if (!idx) throw FormatError("cannot open library index '" + (dir / "index.txt").string() + "'");
    MultiplierLibrary lib;
    lib.source = dir.string();
    std::string line;
    while (std::getline(idx, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        lib.add(load_error_map(dir / line));
    }
    if (lib.empty()) throw FormatError("library index '" + dir.string() + "' lists no multipliers");
    return lib;
}

void MultiplierLibrary::save_dir(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream idx(dir / "index.txt");
    if (!idx) throw FormatError("cannot write library index in '" + dir.string() + "'");
    for (const auto& e : entries_) {
        std::string fname = e->name() + ".emap";
        save_error_map(*e, dir / fname);
        idx << fname << "\n";
    }
}

}  // namespace axnn
