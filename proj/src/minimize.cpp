#include "caprig/minimize.hpp"
