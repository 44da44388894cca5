#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace axnn {

enum class Signedness { Unsigned, Signed };

std::string to_string(Signedness s);
Signedness signedness_from_string(std::string_view s);

// Exhaustive error table for one 8-bit multiplier. Entry (x, w) holds
// approx(x, w) - x * w, indexed by the raw operand bit patterns. Immutable
// after construction, so instances can be shared read-only across workers.
class ErrorMap {
public:
    static constexpr int kBits = 8;
    static constexpr int kSide = 1 << kBits;
    static constexpr int kTableSize = kSide * kSide;

    ErrorMap(std::string name, Signedness sig, std::vector<int32_t> errors, double energy_rel);

    const std::string& name() const { return name_; }
    int bits() const { return kBits; }
    Signedness signedness() const { return sig_; }
    double energy_rel() const { return energy_rel_; }

    int32_t error(uint8_t x, uint8_t w) const {
        return errors_[static_cast<size_t>(x) * kSide + w];
    }
    // Approximate product: x * w + e(x, w), exact integer arithmetic.
    int32_t apply(uint8_t x, uint8_t w) const {
        return static_cast<int32_t>(x) * static_cast<int32_t>(w) + error(x, w);
    }

    bool is_accurate() const;
    const std::vector<int32_t>& table() const { return errors_; }

private:
    std::string name_;
    Signedness sig_;
    std::vector<int32_t> errors_;
    double energy_rel_;
};

// Builtin multiplier families. Energy is caller-supplied metadata; the
// accurate reference is pinned at 1.0.
ErrorMap accurate_map();
// approx(x, w) = ((x >> t) * (w >> t)) << 2t, t in 1..7.
ErrorMap truncated_map(int dropped_lsbs, double energy_rel);
// Mitchell's log/antilog approximation; exact for power-of-two operands and
// defined as 0 whenever either operand is 0.
ErrorMap mitchell_map(double energy_rel);

// Interchange format: header line "emap-v1 <name> <bits> <signedness>
// <energy_rel>" followed by 65536 signed decimal integers in row-major order
// (x outer, w inner), whitespace separated.
ErrorMap load_error_map(const std::filesystem::path& path);
void save_error_map(const ErrorMap& map, const std::filesystem::path& path);

// Ordered set of error maps sharing bit width and signedness; the discrete
// search space for multiplier matching.
class MultiplierLibrary {
public:
    void add(ErrorMap map);
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<std::shared_ptr<const ErrorMap>>& entries() const { return entries_; }
    std::shared_ptr<const ErrorMap> find(std::string_view name) const;
    std::shared_ptr<const ErrorMap> at(size_t i) const { return entries_.at(i); }

    // Directory layout: one interchange file per map plus an index file
    // ("index.txt") listing filenames in search order.
    static MultiplierLibrary load_dir(const std::filesystem::path& dir);
    void save_dir(const std::filesystem::path& dir) const;

    std::string source;

private:
    std::vector<std::shared_ptr<const ErrorMap>> entries_;
};

}  // namespace axnn
