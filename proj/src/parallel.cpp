#include "bneb/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bneb {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	const std::size_t workers = std::min<std::size_t>(threads, count);
	if (workers <= 1) {
		for (std::size_t i = 0; i < count; ++i)
			body(i);
		return;
	}

	std::atomic<std::size_t> next{0};
	std::atomic<bool> failed{false};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto run = [&] {
		for (;;) {
			const std::size_t i = next.fetch_add(1);
			if (i >= count || failed.load())
				return;
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(error_mutex);
				if (!error)
					error = std::current_exception();
				failed.store(true);
			}
		}
	};
	std::vector<std::thread> pool;
	pool.reserve(workers);
	for (std::size_t w = 0; w < workers; ++w)
		pool.emplace_back(run);
	for (auto& t : pool)
		t.join();
	if (error)
		std::rethrow_exception(error);
}

}  // namespace bneb
