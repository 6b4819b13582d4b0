#pragma once

#include <httplib.h>

#include "cspace/service/service.hpp"

namespace cspace {

/// Routes every request on `server` to `service`, replying with JSON.
void mount(httplib::Server& server, Service& service);

}  // namespace cspace
