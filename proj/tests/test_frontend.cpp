#include <doctest.h>

TEST_CASE("placeholder test_frontend") { CHECK(true); }
