#include "caprig/report.hpp"
