#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "axnn/error_map.hpp"
#include "axnn/errors.hpp"

using namespace axnn;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "axnn_test_maps";
    fs::create_directories(p);
    return p;
}

// Independent Mitchell reference: float log/antilog route. All quantities are
// dyadic rationals, so the double arithmetic is exact.
int64_t mitchell_oracle(int x, int w) {
    if (x == 0 || w == 0) return 0;
    auto lead = [](int v) {
        int k = 0;
        while ((1 << (k + 1)) <= v) ++k;
        return k;
    };
    int k1 = lead(x), k2 = lead(w);
    double f1 = static_cast<double>(x) / (1 << k1) - 1.0;
    double f2 = static_cast<double>(w) / (1 << k2) - 1.0;
    double fsum = f1 + f2;
    double approx = fsum < 1.0 ? std::ldexp(1.0 + fsum, k1 + k2) : std::ldexp(fsum, k1 + k2 + 1);
    return std::llround(approx);
}

ErrorMap random_map(uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_int_distribution<int32_t> d(-5000, 5000);
    std::vector<int32_t> tab(ErrorMap::kTableSize);
    for (auto& e : tab) e = d(eng);
    return ErrorMap("rand", Signedness::Unsigned, std::move(tab), 0.5);
}

}  // namespace

TEST_CASE("accurate map is the all-zero table with unit energy") {
    ErrorMap m = accurate_map();
    CHECK(m.error(7, 9) == 0);
    CHECK(m.error(255, 255) == 0);
    CHECK(m.energy_rel() == 1.0);
    CHECK(m.is_accurate());
    CHECK(m.apply(7, 9) == 63);
}

TEST_CASE("truncated map matches brute-force recomputation for every t") {
    for (int t = 1; t <= 7; ++t) {
        ErrorMap m = truncated_map(t, 0.5);
        for (int x = 0; x < 256; ++x)
            for (int w = 0; w < 256; ++w) {
                int32_t expect = (((x >> t) * (w >> t)) << (2 * t)) - x * w;
                REQUIRE(m.error(static_cast<uint8_t>(x), static_cast<uint8_t>(w)) == expect);
            }
    }
}

TEST_CASE("truncated map frozen values") {
    ErrorMap t2 = truncated_map(2, 0.7);
    CHECK(t2.error(7, 9) == -31);
    CHECK(t2.error(4, 8) == 0);
    CHECK(t2.apply(7, 9) == 32);
    for (int t = 1; t <= 7; ++t) {
        ErrorMap m = truncated_map(t, 0.5);
        for (int w = 0; w < 256; ++w) CHECK(m.error(0, static_cast<uint8_t>(w)) == 0);
    }
    CHECK_THROWS_AS(truncated_map(0, 0.5), ConfigError);
    CHECK_THROWS_AS(truncated_map(8, 0.5), ConfigError);
}

TEST_CASE("mitchell map equals the independent log/antilog oracle on all pairs") {
    ErrorMap m = mitchell_map(0.45);
    for (int x = 0; x < 256; ++x)
        for (int w = 0; w < 256; ++w) {
            int64_t approx = static_cast<int64_t>(x) * w +
                             m.error(static_cast<uint8_t>(x), static_cast<uint8_t>(w));
            REQUIRE(approx == mitchell_oracle(x, w));
        }
    // powers of two are exact, zero operands map to zero
    CHECK(m.error(4, 8) == 0);
    CHECK(m.error(0, 200) == 0);
    CHECK(m.error(128, 64) == 0);
    CHECK(m.error(3, 3) == mitchell_oracle(3, 3) - 9);
}

TEST_CASE("apply identity holds exhaustively for an arbitrary table") {
    ErrorMap m = random_map(42);
    for (int x = 0; x < 256; ++x)
        for (int w = 0; w < 256; ++w) {
            uint8_t xu = static_cast<uint8_t>(x), wu = static_cast<uint8_t>(w);
            REQUIRE(m.apply(xu, wu) - x * w == m.error(xu, wu));
        }
    CHECK(m.apply(0, 77) == m.error(0, 77));
}

TEST_CASE("interchange round trip is bit exact") {
    fs::path dir = temp_dir();
    ErrorMap m = truncated_map(3, 0.6);
    fs::path file = dir / "trunc3.emap";
    save_error_map(m, file);
    ErrorMap back = load_error_map(file);
    CHECK(back.name() == m.name());
    CHECK(back.bits() == 8);
    CHECK(back.signedness() == m.signedness());
    CHECK(back.energy_rel() == m.energy_rel());
    REQUIRE(back.table() == m.table());

    fs::path file2 = dir / "trunc3_again.emap";
    save_error_map(back, file2);
    std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("malformed error map files are rejected with offsets") {
    fs::path dir = temp_dir();

    SUBCASE("wrong entry count") {
        fs::path f = dir / "short.emap";
        std::ofstream out(f);
        out << "emap-v1 short 8 unsigned 0.5\n";
        for (int i = 0; i < 65535; ++i) out << "0 ";
        out.close();
        CHECK_THROWS_AS(load_error_map(f), FormatError);
    }
    SUBCASE("too many entries") {
        fs::path f = dir / "long.emap";
        std::ofstream out(f);
        out << "emap-v1 long 8 unsigned 0.5\n";
        for (int i = 0; i < 65537; ++i) out << "1 ";
        out.close();
        CHECK_THROWS_AS(load_error_map(f), FormatError);
    }
    SUBCASE("unsupported bit width") {
        fs::path f = dir / "bits16.emap";
        std::ofstream out(f);
        out << "emap-v1 wide 16 unsigned 0.5\n0\n";
        out.close();
        CHECK_THROWS_AS(load_error_map(f), FormatError);
    }
    SUBCASE("bad header tag") {
        fs::path f = dir / "tag.emap";
        std::ofstream out(f);
        out << "emap-v2 x 8 unsigned 0.5\n";
        out.close();
        CHECK_THROWS_AS(load_error_map(f), FormatError);
    }
    SUBCASE("entry outside int32") {
        fs::path f = dir / "overflow.emap";
        std::ofstream out(f);
        out << "emap-v1 big 8 unsigned 0.5\n99999999999 ";
        for (int i = 0; i < 65535; ++i) out << "0 ";
        out.close();
        try {
            load_error_map(f);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset >= 0);
        }
    }
    SUBCASE("garbage token") {
        fs::path f = dir / "garbage.emap";
        std::ofstream out(f);
        out << "emap-v1 g 8 unsigned 0.5\nxyz\n";
        out.close();
        CHECK_THROWS_AS(load_error_map(f), FormatError);
    }
}

TEST_CASE("library enforces unique names and uniform signedness") {
    MultiplierLibrary lib;
    lib.add(accurate_map());
    lib.add(truncated_map(2, 0.7));
    CHECK_THROWS_AS(lib.add(truncated_map(2, 0.3)), ConfigError);
    ErrorMap sgn("s1", Signedness::Signed, std::vector<int32_t>(ErrorMap::kTableSize, 0), 0.9);
    CHECK_THROWS_AS(lib.add(std::move(sgn)), ConfigError);
    CHECK(lib.find("trunc2") != nullptr);
    CHECK(lib.find("nope") == nullptr);
}

TEST_CASE("library directory round trip preserves order") {
    fs::path dir = temp_dir() / "lib";
    fs::remove_all(dir);
    MultiplierLibrary lib;
    lib.add(accurate_map());
    lib.add(truncated_map(4, 0.49));
    lib.add(mitchell_map(0.45));
    lib.save_dir(dir);
    MultiplierLibrary back = MultiplierLibrary::load_dir(dir);
    REQUIRE(back.size() == 3);
    CHECK(back.at(0)->name() == "accurate");
    CHECK(back.at(1)->name() == "trunc4");
    CHECK(back.at(2)->name() == "mitchell");
    CHECK(back.at(1)->table() == lib.at(1)->table());
    CHECK(back.at(2)->energy_rel() == 0.45);
}

TEST_CASE("map construction rejects bad metadata") {
    std::vector<int32_t> tab(ErrorMap::kTableSize, 0);
    CHECK_THROWS_AS(ErrorMap("", Signedness::Unsigned, tab, 1.0), ConfigError);
    CHECK_THROWS_AS(ErrorMap("a b", Signedness::Unsigned, tab, 1.0), ConfigError);
    CHECK_THROWS_AS(ErrorMap("neg", Signedness::Unsigned, tab, -0.1), ConfigError);
    CHECK_THROWS_AS(ErrorMap("small", Signedness::Unsigned, std::vector<int32_t>(10, 0), 1.0),
                    ConfigError);
}
