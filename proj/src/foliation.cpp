#include "caprig/foliation.hpp"
