#include "caprig/barrier.hpp"
