#include "caprig/cone.hpp"
