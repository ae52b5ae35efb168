#include "caprig/scenario.hpp"
