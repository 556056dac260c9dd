use crate::error::BandwidthError;

/// Call-channel counters of one node.
///
/// `allocated + pre_allocated <= capacity` holds after every operation; the
/// agent state `s(i)` is the unreserved fraction of capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeState {
    capacity: u32,
    allocated: u32,
    pre_allocated: u32,
}

impl NodeState {
    pub fn new(capacity: u32) -> Self {
        NodeState { capacity, allocated: 0, pre_allocated: 0 }
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn allocated(&self) -> u32 {
        self.allocated
    }

    pub fn pre_allocated(&self) -> u32 {
        self.pre_allocated
    }

    pub fn free(&self) -> u32 {
        self.capacity - self.allocated - self.pre_allocated
    }

    /// Fraction of capacity neither allocated nor pre-allocated.
    pub fn state(&self) -> f64 {
        self.free() as f64 / self.capacity as f64
    }

    /// Reserves a unit for a call still being forwarded.
    pub fn pre_allocate(&mut self) -> Result<(), BandwidthError> {
        if self.free() == 0 {
            return Err(BandwidthError::NoFreeUnit);
        }
        self.pre_allocated += 1;
        Ok(())
    }

    /// Converts a pre-allocation into an allocation once the call connects.
    pub fn commit(&mut self) -> Result<(), BandwidthError> {
        if self.pre_allocated == 0 {
            return Err(BandwidthError::NothingPreAllocated);
        }
        self.pre_allocated -= 1;
        self.allocated += 1;
        Ok(())
    }

    /// Fresh allocation, used by the destination on connect.
    pub fn allocate(&mut self) -> Result<(), BandwidthError> {
        if self.free() == 0 {
            return Err(BandwidthError::NoFreeUnit);
        }
        self.allocated += 1;
        Ok(())
    }

    pub fn release_pre_allocated(&mut self) -> Result<(), BandwidthError> {
        if self.pre_allocated == 0 {
            return Err(BandwidthError::NothingPreAllocated);
        }
        self.pre_allocated -= 1;
        Ok(())
    }

    pub fn release_allocated(&mut self) -> Result<(), BandwidthError> {
        if self.allocated == 0 {
            return Err(BandwidthError::NothingAllocated);
        }
        self.allocated -= 1;
        Ok(())
    }
}
