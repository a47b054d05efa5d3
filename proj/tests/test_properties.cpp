#include <doctest.h>

TEST_CASE("placeholder test_properties") { CHECK(true); }
