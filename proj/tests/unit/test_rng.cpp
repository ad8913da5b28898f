#include <doctest.h>

#include <cmath>
#include <set>

#include "rng.hpp"

using namespace bansa;

TEST_CASE("streams with the same key produce identical sequences") {
    RngStream a = make_stream(7, "test", 3);
    RngStream b = make_stream(7, "test", 3);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("role and index changes decorrelate streams") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 50; ++i) {
        keys.insert(make_stream(1, "a", i).key());
        keys.insert(make_stream(1, "b", i).key());
        keys.insert(make_stream(2, "a", i).key());
    }
    CHECK(keys.size() == 150);
}

TEST_CASE("split is independent of the parent position") {
    RngStream fresh = make_stream(11, "split");
    RngStream consumed = make_stream(11, "split");
    for (int i = 0; i < 17; ++i) consumed.next_u64();
    CHECK(fresh.split(4).key() == consumed.split(4).key());
    CHECK(fresh.split(4).key() != fresh.split(5).key());
}

TEST_CASE("next_unit stays in [0,1)") {
    RngStream stream = make_stream(3, "unit");
    for (int i = 0; i < 10000; ++i) {
        const double u = stream.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussian draws have roughly standard moments") {
    RngStream stream = make_stream(5, "gauss");
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = stream.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.03);
    CHECK(std::fabs(var - 1.0) < 0.05);
}
