#include "caprig/expansions.hpp"
