#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/dyadic.hpp>

using namespace extremal_rays;

TEST_CASE("dyadic arithmetic is exact") {
    Dyadic a(3, 2);   // 3/4
    Dyadic b(1, 3);   // 1/8
    CHECK((a + b) == Dyadic(7, 3));
    CHECK((a - b) == Dyadic(5, 3));
    CHECK((a * b) == Dyadic(3, 5));
    CHECK(a.value() == 0.75);
    CHECK((-a).value() == -0.75);
    CHECK(Dyadic(4, 2) == Dyadic(1));  // normalization
}

TEST_CASE("dyadic ordering") {
    CHECK(Dyadic(1, 3) < Dyadic(1, 2));
    CHECK(Dyadic(-1, 1) < Dyadic(0));
    CHECK(Dyadic(5, 3) > Dyadic(1, 1));
}

TEST_CASE("exact division and divisibility") {
    CHECK(exact_div(Dyadic(3, 2), Dyadic(1, 4)) == 12);
    CHECK(divides(Dyadic(1, 4), Dyadic(3, 2)));
    CHECK(!divides(Dyadic(3, 4), Dyadic(1, 2)));
    CHECK_THROWS_AS(exact_div(Dyadic(1, 2), Dyadic(3, 4)), resolution_error);
}

TEST_CASE("parse accepts p/2^q, fractions, decimals") {
    CHECK(Dyadic::parse("1/2^9") == Dyadic(1, 9));
    CHECK(Dyadic::parse("3/512") == Dyadic(3, 9));
    CHECK(Dyadic::parse("0.75") == Dyadic(3, 2));
    CHECK(Dyadic::parse("2") == Dyadic(2));
    CHECK(Dyadic::parse("-0.5") == Dyadic(-1, 1));
    CHECK(Dyadic::parse("2^-10") == Dyadic(1, 10));
    CHECK_THROWS_AS(Dyadic::parse("0.1"), invalid_parameter);
    CHECK_THROWS_AS(Dyadic::parse("1/3"), invalid_parameter);
}

TEST_CASE("decimal round trip") {
    for (const char* s : {"0.75", "0.0009765625", "-2.5", "17", "0.31250"}) {
        Dyadic d = Dyadic::parse(s);
        CHECK(Dyadic::parse(d.to_decimal()) == d);
    }
    CHECK(Dyadic(3, 2).to_decimal() == "0.75");
    CHECK(Dyadic(1, 10).to_decimal() == "0.0009765625");
    CHECK(Dyadic(0).to_decimal() == "0");
}
