#include <doctest.h>

TEST_CASE("placeholder test_simulation") { CHECK(true); }
