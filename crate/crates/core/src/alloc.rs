//! Allocation accounting for benchmarks.
//!
//! Install [`TrackingAllocator`] as the global allocator in a binary to make
//! [`snapshot`] and [`Scope`] report real numbers:
//!
//! ```ignore
//! #[global_allocator]
//! static ALLOC: quantile_bootstrap::alloc::TrackingAllocator = quantile_bootstrap::alloc::TrackingAllocator;
//! ```
//!
//! Without it every query returns `None`. Counters are process-wide, so
//! allocations from other threads during a measurement are included.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering::Relaxed};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static TOTAL: AtomicUsize = AtomicUsize::new(0);
static INSTALLED: AtomicBool = AtomicBool::new(false);

/// The system allocator plus live, peak and cumulative byte counters.
#[derive(Debug, Default, Clone, Copy)]
pub struct TrackingAllocator;

impl TrackingAllocator {
    #[inline]
    fn on_alloc(size: usize) {
        INSTALLED.store(true, Relaxed);
        TOTAL.fetch_add(size, Relaxed);
        let now = CURRENT.fetch_add(size, Relaxed) + size;
        PEAK.fetch_max(now, Relaxed);
    }
}

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            Self::on_alloc(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc_zeroed(layout) };
        if !p.is_null() {
            Self::on_alloc(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            CURRENT.fetch_sub(layout.size(), Relaxed);
            Self::on_alloc(new_size);
        }
        p
    }
}

/// Process-wide counters at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocSnapshot {
    pub current_bytes: usize,
    pub peak_bytes: usize,
    pub total_allocated_bytes: usize,
}

/// `None` unless [`TrackingAllocator`] is the global allocator.
pub fn snapshot() -> Option<AllocSnapshot> {
    INSTALLED.load(Relaxed).then(|| AllocSnapshot {
        current_bytes: CURRENT.load(Relaxed),
        peak_bytes: PEAK.load(Relaxed),
        total_allocated_bytes: TOTAL.load(Relaxed),
    })
}

/// Memory used by a region of code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocUsage {
    /// Highest live heap above the level at the start of the region.
    pub peak_extra_bytes: usize,
    /// Sum of all allocation sizes requested inside the region.
    pub allocated_bytes: usize,
}

/// Measures the region between [`Scope::start`] and [`Scope::finish`].
/// Overlapping scopes share the peak counter and disturb each other.
#[derive(Debug)]
pub struct Scope {
    start: Option<AllocSnapshot>,
}

impl Scope {
    pub fn start() -> Self {
        if INSTALLED.load(Relaxed) {
            PEAK.store(CURRENT.load(Relaxed), Relaxed);
        }
        Self { start: snapshot() }
    }

    pub fn finish(self) -> Option<AllocUsage> {
        let (start, end) = (self.start?, snapshot()?);
        Some(AllocUsage {
            peak_extra_bytes: end.peak_bytes.saturating_sub(start.current_bytes),
            allocated_bytes: end.total_allocated_bytes - start.total_allocated_bytes,
        })
    }
}
