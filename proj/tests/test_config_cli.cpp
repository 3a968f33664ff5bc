#include <doctest.h>

TEST_SUITE_BEGIN("config_cli");
TEST_CASE("placeholder") { CHECK(true); }
TEST_SUITE_END();
