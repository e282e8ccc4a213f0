#pragma once

// Every translation unit that uses httplib must see the same configuration.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
