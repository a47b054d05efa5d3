#include <doctest.h>

TEST_CASE("placeholder test_cond") { CHECK(true); }
