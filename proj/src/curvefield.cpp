#include "caprig/curvefield.hpp"
