#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fimstar/kernels.hpp"

namespace fimstar::kernels {

namespace {

const KernelTable* pick_default() {
    const char* forced = std::getenv("FIMSTAR_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
        return &scalar_table();
    }
    if (const KernelTable* t = avx2_table()) {
        return t;
    }
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{pick_default()};
    return current;
}

}  // namespace

const KernelTable& active() {
    return *slot().load(std::memory_order_acquire);
}

bool select(Isa isa) {
    const KernelTable* table = isa == Isa::avx2 ? avx2_table() : &scalar_table();
    if (table == nullptr) {
        return false;
    }
    slot().store(table, std::memory_order_release);
    return true;
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace fimstar::kernels
