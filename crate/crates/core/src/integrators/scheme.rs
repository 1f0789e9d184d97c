//! Scheme selection: time integrator, interpolation order, equilibrium and correction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrators::tableau::{BdfCoeffs, Tableau};
use crate::maxwellian::MaxwellianKind;
use crate::reconstruction::GwenoOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    IE,
    DIRK2,
    DIRK3,
    BDF2,
    BDF3,
}

impl TimeScheme {
    pub fn order(self) -> usize {
        match self {
            TimeScheme::IE => 1,
            TimeScheme::DIRK2 | TimeScheme::BDF2 => 2,
            TimeScheme::DIRK3 | TimeScheme::BDF3 => 3,
        }
    }

    pub fn is_bdf(self) -> bool {
        matches!(self, TimeScheme::BDF2 | TimeScheme::BDF3)
    }

    /// Interpolation order the scheme is paired with.
    pub fn paired_space(self) -> GwenoOrder {
        match self.order() {
            1 => GwenoOrder::Linear,
            2 => GwenoOrder::W23,
            _ => GwenoOrder::W35,
        }
    }

    /// Tableau of a one-step scheme, or of the DIRK that starts a BDF scheme.
    pub fn tableau(self) -> Tableau {
        match self.order() {
            1 => Tableau::implicit_euler(),
            2 => Tableau::dirk2(),
            _ => Tableau::dirk3(),
        }
    }

    pub fn bdf_coeffs(self) -> Option<BdfCoeffs> {
        match self {
            TimeScheme::BDF2 => Some(BdfCoeffs::bdf2()),
            TimeScheme::BDF3 => Some(BdfCoeffs::bdf3()),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            TimeScheme::IE => "IE-SL",
            TimeScheme::DIRK2 => "RK2",
            TimeScheme::DIRK3 => "RK3",
            TimeScheme::BDF2 => "BDF2",
            TimeScheme::BDF3 => "BDF3",
        }
    }
}

/// A complete scheme such as `RK3-W35-DM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeSpec {
    pub time: TimeScheme,
    pub space: GwenoOrder,
    pub maxwellian: MaxwellianKind,
    pub conservative: bool,
}

impl SchemeSpec {
    pub fn new(
        time: TimeScheme,
        space: GwenoOrder,
        maxwellian: MaxwellianKind,
        conservative: bool,
    ) -> Result<Self> {
        let spec = Self {
            time,
            space,
            maxwellian,
            conservative,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Rejects pairings other than IE-Linear, order 2 with W23 and order 3 with W35.
    pub fn validate(&self) -> Result<()> {
        if self.space != self.time.paired_space() {
            return Err(Error::Pairing(format!(
                "{} must be paired with {} interpolation, not {}",
                self.time.label(),
                self.time.paired_space().name(),
                self.space.name()
            )));
        }
        Ok(())
    }

    /// Parses names like `RK3-W35-DM`, `BDF2-W23-DM`, `IE-SL-Linear-DM` or `Classical RK3-W35-DM`.
    ///
    /// A leading `Classical` selects the non-conservative form and `Conservative` the
    /// corrected one. Without either, RK and BDF names ending in `DM` or `CM` are
    /// conservative, names without an equilibrium suffix are classical with the
    /// continuous Maxwellian, and IE is classical.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("scheme name {name:?}: {why}"));
        let mut tokens: Vec<String> = name
            .split(|c: char| c == '-' || c == '_' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_ascii_uppercase())
            .collect();
        let mut conservative = None;
        match tokens.first().map(String::as_str) {
            Some("CLASSICAL") => {
                conservative = Some(false);
                tokens.remove(0);
            }
            Some("CONSERVATIVE") => {
                conservative = Some(true);
                tokens.remove(0);
            }
            _ => {}
        }
        let mut tokens = tokens.into_iter().peekable();
        let time = match tokens.next().as_deref() {
            Some("IE") | Some("IESL") => TimeScheme::IE,
            Some("RK2") | Some("DIRK2") => TimeScheme::DIRK2,
            Some("RK3") | Some("DIRK3") => TimeScheme::DIRK3,
            Some("BDF2") => TimeScheme::BDF2,
            Some("BDF3") => TimeScheme::BDF3,
            Some(other) => return Err(bad(&format!("unknown time integrator {other:?}"))),
            None => return Err(bad("empty name")),
        };
        if time == TimeScheme::IE && tokens.peek().map(String::as_str) == Some("SL") {
            tokens.next();
        }
        let mut space = None;
        let mut maxwellian = None;
        for t in tokens {
            match t.as_str() {
                "LINEAR" | "L" => space = Some(GwenoOrder::Linear),
                "W23" | "WENO23" => space = Some(GwenoOrder::W23),
                "W35" | "WENO35" => space = Some(GwenoOrder::W35),
                "DM" if maxwellian.is_none() => maxwellian = Some(MaxwellianKind::Discrete),
                "CM" if maxwellian.is_none() => maxwellian = Some(MaxwellianKind::Continuous),
                other => return Err(bad(&format!("unexpected token {other:?}"))),
            }
        }
        let space = space.unwrap_or_else(|| time.paired_space());
        let conservative = conservative.unwrap_or(time != TimeScheme::IE && maxwellian.is_some());
        let maxwellian = maxwellian.unwrap_or(MaxwellianKind::Continuous);
        Self::new(time, space, maxwellian, conservative)
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let default_conservative = self.time != TimeScheme::IE;
        if self.conservative != default_conservative {
            write!(
                f,
                "{} ",
                if self.conservative {
                    "Conservative"
                } else {
                    "Classical"
                }
            )?;
        }
        let m = match self.maxwellian {
            MaxwellianKind::Discrete => "DM",
            MaxwellianKind::Continuous => "CM",
        };
        write!(f, "{}-{}-{}", self.time.label(), self.space.name(), m)
    }
}
