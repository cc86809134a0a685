use std::fmt;

use crate::error::{Error, Result};

/// Spin projection of an orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Orbital index of `(site, spin)`: site-major, up before down.
///
/// This is also the qubit index under the Jordan-Wigner mapping, so even
/// qubits carry spin-up electrons.
#[inline]
pub fn orbital(site: usize, spin: Spin) -> usize {
    2 * site + spin.index()
}

/// Occupation bitstring; bit `p` is the occupation of orbital `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(pub u64);

impl FockState {
    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_occupied(self, orbital: usize) -> bool {
        self.0 >> orbital & 1 == 1
    }

    pub fn count(self, spin: Spin) -> usize {
        let mask = match spin {
            Spin::Up => 0x5555_5555_5555_5555u64,
            Spin::Down => 0xAAAA_AAAA_AAAA_AAAAu64,
        };
        (self.0 & mask).count_ones() as usize
    }

    pub fn double_occupancies(self, n_sites: usize) -> usize {
        (0..n_sites)
            .filter(|&i| self.is_occupied(orbital(i, Spin::Up)) && self.is_occupied(orbital(i, Spin::Down)))
            .count()
    }

    /// Ket label with orbital 0 leftmost, e.g. `|1001⟩`.
    pub fn label(self, n_orbitals: usize) -> String {
        let s: String = (0..n_orbitals).map(|p| if self.is_occupied(p) { '1' } else { '0' }).collect();
        format!("|{s}⟩")
    }
}

/// Which states a [`Basis`] contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// Fixed numbers of up and down electrons.
    Fixed { n_up: usize, n_down: usize },
    /// The whole Fock space of `2 * n_sites` orbitals.
    All,
}

/// Ordered list of Fock states, sorted by bit value.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis {
    n_sites: usize,
    sector: Sector,
    states: Vec<FockState>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("n_sites", &self.n_sites)
            .field("sector", &self.sector)
            .field("dim", &self.states.len())
            .finish()
    }
}

/// All `n`-bit masks with exactly `k` ones, ascending.
fn combinations(n: usize, k: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// Spread a site mask onto the orbitals of one spin.
fn spread(mask: u64, spin: Spin) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let site = m.trailing_zeros() as usize;
        out |= 1 << orbital(site, spin);
        m &= m - 1;
    }
    out
}

pub const MAX_SITES: usize = 16;

/// Basis of the `(n_sites, n_up, n_down)` sector.
pub fn build_basis(n_sites: usize, n_up: usize, n_down: usize) -> Result<Basis> {
    if n_sites == 0 || n_sites > MAX_SITES || n_up > n_sites || n_down > n_sites {
        return Err(Error::SectorEmpty { n_sites, n_up, n_down });
    }
    let ups = combinations(n_sites, n_up);
    let downs = combinations(n_sites, n_down);
    let mut states = Vec::with_capacity(ups.len() * downs.len());
    for &u in &ups {
        let ub = spread(u, Spin::Up);
        for &d in &downs {
            states.push(FockState(ub | spread(d, Spin::Down)));
        }
    }
    states.sort_unstable();
    Ok(Basis { n_sites, sector: Sector::Fixed { n_up, n_down }, states })
}

impl Basis {
    /// Half-filled, zero-magnetisation sector of an even number of sites.
    pub fn half_filled(n_sites: usize) -> Result<Basis> {
        if n_sites % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "half filling with Sz = 0 needs an even site count, got {n_sites}"
            )));
        }
        build_basis(n_sites, n_sites / 2, n_sites / 2)
    }

    /// Every occupation pattern of `2 * n_sites` orbitals.
    pub fn full(n_sites: usize) -> Result<Basis> {
        if n_sites == 0 || n_sites > 8 {
            return Err(Error::InvalidParams(format!("full Fock space limited to 8 sites, got {n_sites}")));
        }
        let states = (0u64..1 << (2 * n_sites)).map(FockState).collect();
        Ok(Basis { n_sites, sector: Sector::All, states })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_orbitals(&self) -> usize {
        2 * self.n_sites
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> FockState {
        self.states[i]
    }

    pub fn index_of(&self, s: FockState) -> Option<usize> {
        match self.sector {
            Sector::All => ((s.0 as usize) < self.states.len()).then_some(s.0 as usize),
            Sector::Fixed { .. } => self.states.binary_search(&s).ok(),
        }
    }

    pub fn is_half_filled(&self) -> bool {
        matches!(self.sector, Sector::Fixed { n_up, n_down } if n_up + n_down == self.n_sites)
    }
}
