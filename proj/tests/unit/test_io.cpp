#include <sstream>

#include "doctest.h"
#include "tlsdrive/io.hpp"

using namespace tls;

TEST_CASE("numbers with a factor of pi") {
    CHECK(io::parse_number("1.25") == 1.25);
    CHECK(io::parse_number("pi") == kPi);
    CHECK(io::parse_number("-pi/2") == -kPi / 2);
    CHECK(io::parse_number("3*pi/4") == 3 * kPi / 4);
    CHECK(io::parse_number("0.05pi") == 0.05 * kPi);
    CHECK(io::parse_number(" 2e-3 ") == 2e-3);
    CHECK_THROWS_AS(io::parse_number("abc"), Error);
    CHECK_THROWS_AS(io::parse_number("1/0"), Error);
    CHECK_THROWS_AS(io::parse_number(""), Error);
}

TEST_CASE("config parsing") {
    const auto cfg = io::parse_config(R"(
# comment
name = demo   # trailing comment
delta[]   = 50, 40
epsilon[] = 1, 2
area[]    = pi/2, pi/2
)");
    REQUIRE(cfg.steps.size() == 2);
    CHECK(cfg.get("name") == "demo");
    CHECK(cfg.get("missing", "x") == "x");
    CHECK(cfg.steps[0].theta == 0.0);
    CHECK(cfg.steps[0].energy() * cfg.steps[0].tau == doctest::Approx(kPi / 2));
    CHECK(cfg.steps[1].epsilon == 2.0);
    CHECK(cfg.sequence().size() == 2);
}

TEST_CASE("config errors name the problem") {
    auto code = [](const char* text) {
        try {
            io::parse_config(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::EmptySequence;
    };
    CHECK(code("delta[] = 0\nepsilon[] = 1\n") == ErrorCode::ParseError);
    CHECK(code("delta[] = 0\nepsilon[] = 1\ntau[] = 1\narea[] = 1\n") == ErrorCode::ParseError);
    CHECK(code("delta[] = 0, 1\nepsilon[] = 1\ntau[] = 1\n") == ErrorCode::ParseError);
    CHECK(code("delta[] = 0\nepsilon[] = 1\ntau[] = 1\nfoo[] = 2\n") == ErrorCode::ParseError);
    CHECK(code("delta[] = 0\nepsilon[] = 1\ntau[] = x\n") == ErrorCode::ParseError);
    CHECK(code("delta[] = 0\nepsilon[] = 1\ntau[] = -1\n") == ErrorCode::NonPositiveDuration);
    try {
        io::parse_config("delta[] = 0\nepsilon[] 1\n");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("formatted config round-trips exactly") {
    io::Config cfg;
    cfg.steps = {{0.1, 1.0 / 3.0, -2.5, 0.7}, {40.0, 2.0, kPi / 3, 1e-3}};
    cfg.settings["name"] = "rt";
    const auto back = io::parse_config(io::format_config(cfg));
    REQUIRE(back.steps.size() == 2);
    for (std::size_t n = 0; n < 2; ++n) {
        CHECK(back.steps[n].delta == cfg.steps[n].delta);
        CHECK(back.steps[n].epsilon == cfg.steps[n].epsilon);
        CHECK(back.steps[n].theta == cfg.steps[n].theta);
        CHECK(back.steps[n].tau == cfg.steps[n].tau);
    }
    CHECK(back.get("name") == "rt");
}

TEST_CASE("CSV rows use round-trip precision") {
    std::ostringstream out;
    io::CsvWriter csv(out, {"a", "b"});
    csv.row({0.1, 1.0 / 3.0});
    CHECK(out.str() == "a,b\n0.10000000000000001,0.33333333333333331\n");
    CHECK_THROWS_AS(csv.row({1.0}), Error);
    CHECK(std::stod(io::format_number(kPi)) == kPi);
}
