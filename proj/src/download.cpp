#include "restarch/download.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

#include "restarch/error.hpp"

namespace restarch {

std::filesystem::path download_location(const std::filesystem::path& dir, const ResourcePath& file) {
    std::filesystem::path out = dir;
    for (const auto& seg : file.segments()) {
        const auto& id = *seg.pattern;
        if (id == "." || id == "..") throw InvalidPath("refusing to write outside '" + dir.string() + "'");
        bool top = seg.level == "projects" || seg.level == "subjects" || seg.level == "experiments";
        if (!top && seg.level != "files") out /= seg.level;
        out /= id;
    }
    return out;
}

std::vector<std::filesystem::path> download_all(ElementStream& stream, const std::filesystem::path& dir,
                                                unsigned workers) {
    workers = std::max(1u, workers);
    const std::size_t capacity = 2 * static_cast<std::size_t>(workers);

    std::mutex mutex;
    std::condition_variable ready, space;
    std::deque<ElementHandle> queue;
    bool closed = false;
    std::exception_ptr failure;
    std::vector<std::filesystem::path> written;

    auto work = [&] {
        for (;;) {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return !queue.empty() || closed; });
            if (queue.empty()) return;
            auto handle = std::move(queue.front());
            queue.pop_front();
            space.notify_one();
            if (failure) continue;
            lock.unlock();
            try {
                auto path = handle.get_file(download_location(dir, handle.path()));
                lock.lock();
                written.push_back(std::move(path));
            } catch (...) {
                lock.lock();
                if (!failure) failure = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);

    try {
        while (auto e = stream.next()) {
            if (e->level() != "files") continue;
            std::unique_lock lock(mutex);
            space.wait(lock, [&] { return queue.size() < capacity || failure; });
            if (failure) break;
            queue.push_back(std::move(*e));
            ready.notify_one();
        }
    } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
    }
    {
        std::lock_guard lock(mutex);
        closed = true;
    }
    ready.notify_all();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace restarch
