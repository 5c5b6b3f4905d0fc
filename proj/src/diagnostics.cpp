#include "fadexp/errors.hpp"

#include <iostream>
#include <mutex>

namespace fadexp {

namespace {
std::mutex g_mu;
WarningHandler g_handler = [](std::string_view m) { std::cerr << "warning: " << m << '\n'; };
}  // namespace

void set_warning_handler(WarningHandler h)
{
    std::lock_guard lk(g_mu);
    g_handler = h ? std::move(h) : WarningHandler([](std::string_view) {});
}

void warn(std::string_view msg)
{
    std::lock_guard lk(g_mu);
    g_handler(msg);
}

}  // namespace fadexp
