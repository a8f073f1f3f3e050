use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TcpVariant {
    Tahoe,
    Reno,
    NewReno,
    Vegas,
    Sack,
}

impl TcpVariant {
    pub const ALL: [TcpVariant; 5] = [
        TcpVariant::Tahoe,
        TcpVariant::Reno,
        TcpVariant::NewReno,
        TcpVariant::Vegas,
        TcpVariant::Sack,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TcpVariant::Tahoe => "tahoe",
            TcpVariant::Reno => "reno",
            TcpVariant::NewReno => "newreno",
            TcpVariant::Vegas => "vegas",
            TcpVariant::Sack => "sack",
        }
    }

    pub fn uses_sack(self) -> bool {
        self == TcpVariant::Sack
    }
}

impl fmt::Display for TcpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TcpVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        TcpVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == lower)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown TCP variant {s:?} (expected tahoe, reno, newreno, vegas or sack)"
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_is_case_insensitive() {
        assert_eq!("NewReno".parse::<TcpVariant>().unwrap(), TcpVariant::NewReno);
        assert_eq!("SACK".parse::<TcpVariant>().unwrap(), TcpVariant::Sack);
        assert!("cubic".parse::<TcpVariant>().is_err());
        for v in TcpVariant::ALL {
            assert_eq!(v.to_string().parse::<TcpVariant>().unwrap(), v);
        }
    }
}
