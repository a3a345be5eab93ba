#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "doctic/modular.hpp"

using namespace doctic;

namespace {

std::string form_path(const std::string& name) {
    std::string file = name;
    file[file.find('/')] = '_';
    return "data/forms/" + file + ".txt";
}

std::map<std::string, std::vector<Int>> load_qexp_golden() {
    std::ifstream in("data/golden/qexp.txt");
    REQUIRE(in);
    std::map<std::string, std::vector<Int>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto bar = line.find('|');
        REQUIRE(bar != std::string::npos);
        std::istringstream name(line.substr(0, bar)), coeffs(line.substr(bar + 1));
        std::string n, c;
        name >> n;
        std::vector<Int> v;
        while (coeffs >> c) v.push_back(Int(c));
        out[n] = v;
    }
    REQUIRE(out.size() == 5);
    return out;
}

// rows: name -> (L1, L2, flag)
std::map<std::string, std::array<std::string, 3>> load_lvalue_golden() {
    std::ifstream in("data/golden/lvalues.txt");
    REQUIRE(in);
    std::map<std::string, std::array<std::string, 3>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string n, l1, l2, flag;
        ls >> n >> l1 >> l2 >> flag;
        out[n] = {l1, l2, flag};
    }
    REQUIRE(out.size() == 5);
    return out;
}

}  // namespace

TEST_CASE("load_form: all five forms load and pass the q-expansion checksum") {
    auto golden = load_qexp_golden();
    for (const auto& [name, qexp] : golden) {
        auto f = load_form(form_path(name));
        CHECK(f.name == name);
        CHECK(f.weight == 4);
        CHECK(f.atkin_lehner == 1);
        CHECK(f.max_prime() >= 599);
        auto a = extend_coefficients(f, long(qexp.size()));
        for (size_t n = 1; n <= qexp.size(); ++n) {
            INFO(name << " a_" << n);
            CHECK(a[n] == qexp[n - 1]);
        }
    }
}

TEST_CASE("load_form: rejects malformed input") {
    auto write_tmp = [](const std::string& body) {
        std::string path = "/tmp/doctic_form_test.txt";
        std::ofstream out(path);
        out << body;
        return path;
    };
    CHECK_THROWS_WITH(load_form(write_tmp("x/1 6 2 +1\n2 -2\n")),
                      Catch::Matchers::ContainsSubstring("weight"));
    CHECK_THROWS_WITH(load_form(write_tmp("x/1 6 4 +1\n2 -2\n5 6\n")),
                      Catch::Matchers::ContainsSubstring("missing prime 3"));
    // 2 does not divide 7, and 99^2 > 4*8: Deligne bound fails
    CHECK_THROWS_WITH(load_form(write_tmp("x/1 7 4 +1\n2 99\n")),
                      Catch::Matchers::ContainsSubstring("Deligne"));
    CHECK_THROWS_WITH(load_form(write_tmp("x/1 6 4 +1\n4 -2\n")),
                      Catch::Matchers::ContainsSubstring("composite"));
}

TEST_CASE("extend_coefficients: Hecke recursion spot checks") {
    auto f8 = load_form(form_path("8/1"));
    auto a8 = extend_coefficients(f8, 20);
    CHECK(a8[3] == -4);
    CHECK(a8[9] == -11);  // (-4)^2 - 27

    auto f32 = load_form(form_path("32/1"));
    auto a32 = extend_coefficients(f32, 10);
    CHECK(a32[3] == 0);
    CHECK(a32[9] == -27);

    auto f6 = load_form(form_path("6/1"));
    auto a6 = extend_coefficients(f6, 12);
    CHECK(a6[2] == -2);
    CHECK(a6[4] == 4);  // 2 | 6: a_4 = a_2^2
    CHECK(a6[6] == 6);  // multiplicativity
    CHECK(a6[12] == a6[4] * a6[3]);
}

TEST_CASE("extend_coefficients: multiplicativity and recursion hold globally") {
    for (const char* name : {"6/1", "8/1", "12/1", "32/1", "32/2"}) {
        auto f = load_form(form_path(name));
        auto a = extend_coefficients(f, 600);
        for (long m = 2; m <= 24; ++m)
            for (long n = m + 1; n <= 600 / m; ++n) {
                if (gcd(Int(m), Int(n)) != 1) continue;
                INFO(name << " m=" << m << " n=" << n);
                REQUIRE(a[m * n] == a[m] * a[n]);
            }
        for (long p : {2L, 3L, 5L, 7L}) {
            if (f.level % p == 0 || p * p * p > 600) continue;
            INFO(name << " p=" << p);
            REQUIRE(a[p * p * p] == a[p] * a[p * p] - Int(p) * Int(p) * Int(p) * a[p]);
        }
    }
}

TEST_CASE("l_value: published 25-digit critical values") {
    auto golden = load_lvalue_golden();
    for (const auto& [name, row] : golden) {
        auto f = load_form(form_path(name));
        Real l1 = l_value(f, 1), l2 = l_value(f, 2);
        INFO(name);
        CHECK(abs(l1 - Real(row[0].c_str())) < 1e-25 * Real(row[0].c_str()));
        CHECK(abs(l2 - Real(row[1].c_str())) < 1e-25 * Real(row[1].c_str()));
    }
}

TEST_CASE("l_value: the printed L(6/1,2) misprint is matched only to 10 digits") {
    std::ifstream in("data/golden/lvalues_printed.txt");
    REQUIRE(in);
    std::string line, name, printed;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        ls >> name >> printed;
    }
    REQUIRE(name == "6/1");
    auto f = load_form(form_path(name));
    Real l2 = l_value(f, 2);
    CHECK(abs(l2 - Real(printed.c_str())) < 1e-10);   // agrees to the printed 10 good digits
    CHECK(abs(l2 - Real(printed.c_str())) > 1e-12);   // and genuinely differs past them
}

TEST_CASE("l_value: functional equation and the section identity") {
    for (const char* name : {"6/1", "8/1", "12/1", "32/1", "32/2"}) {
        auto f = load_form(form_path(name));
        auto v = l_values(f);
        INFO(name);
        CHECK(abs(v.lambda1 - v.lambda3) < 1e-28 * abs(v.lambda1));
        CHECK(abs(v.L3 * f.level - 2 * pi_real() * pi_real() * v.L1) < 1e-20);
    }
}

TEST_CASE("l_value: stable under raising the precision target") {
    auto f = load_form(form_path("8/1"));
    Real a = l_value(f, 1, 25), b = l_value(f, 1, 28);
    CHECK(abs(a - b) < 1e-25 * a);
}
