use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::frames::{dual_frame, make_bb84, make_trine, Frame};

/// Signal ensemble plus Bob's measurement.
///
/// * `Trine`: Alice sends trine states, Bob measures the dual ("exclusion")
///   trine, so Bob's outcome `b` rules out signal `b`.
/// * `Bb84`: Alice sends the four BB84 states, Bob measures all four as a
///   single amalgamated POVM. No sifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Trine,
    Bb84,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Trine, Protocol::Bb84];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Trine => "trine",
            Protocol::Bb84 => "bb84",
        }
    }

    pub fn signal_frame(self) -> Frame {
        match self {
            Protocol::Trine => make_trine(),
            Protocol::Bb84 => make_bb84(),
        }
    }

    pub fn bob_frame(self) -> Frame {
        match self {
            Protocol::Trine => dual_frame(&make_trine()).expect("trine is a qubit frame"),
            Protocol::Bb84 => make_bb84(),
        }
    }

    /// Eve's measurement for intercept-resend. For the trine she measures
    /// both ensembles at once: dual trine (outcomes 0-2) then trine (3-5).
    /// BB84 is closed under orthogonal complement, so both ensembles are
    /// just the four BB84 states.
    pub fn intercept_frame(self) -> Frame {
        match self {
            Protocol::Trine => {
                let trine = make_trine();
                let dual = dual_frame(&trine).expect("trine is a qubit frame");
                Frame::concat("dual(trine)+trine", &dual, &trine).expect("same dimension")
            }
            Protocol::Bb84 => make_bb84(),
        }
    }

    /// Eve's probe measurement for the cloning attack (same as Bob's).
    pub fn clone_frame(self) -> Frame {
        self.bob_frame()
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trine" => Ok(Protocol::Trine),
            "bb84" => Ok(Protocol::Bb84),
            _ => Err(Error::UnknownProtocol(s.to_string())),
        }
    }
}
