use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluator::TrainingExample;
use crate::game::StateTensor;

/// `{s, pi(s), z(s)}` for one searched ply, tagged with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub example: TrainingExample,
    pub game_id: u64,
    /// Action index within the game, counting random and pass moves.
    pub ply: u32,
}

impl Experience {
    pub fn z(&self) -> f64 {
        self.example.value
    }

    pub fn pi(&self) -> &[f64] {
        &self.example.policy
    }
}

/// The experiences of one self-play game, in ply order.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub game_id: u64,
    pub experiences: Vec<Experience>,
}

/// Experiences grouped by game, oldest game first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceBuffer {
    games: VecDeque<GameRecord>,
    capacity_games: usize,
}

const BUFFER_MAGIC: &[u8; 8] = b"EGBUF\0\0\x01";

impl ExperienceBuffer {
    pub fn new(capacity_games: usize) -> Self {
        ExperienceBuffer {
            games: VecDeque::new(),
            capacity_games: capacity_games.max(1),
        }
    }

    pub fn capacity_games(&self) -> usize {
        self.capacity_games
    }

    /// Appends a game, evicting the oldest games beyond capacity.
    pub fn push_game(&mut self, game_id: u64, experiences: Vec<Experience>) {
        self.games.push_back(GameRecord {
            game_id,
            experiences,
        });
        while self.games.len() > self.capacity_games {
            self.games.pop_front();
        }
    }

    pub fn game_count(&self) -> usize {
        self.games.len()
    }

    pub fn len(&self) -> usize {
        self.games.iter().map(|g| g.experiences.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn games(&self) -> impl Iterator<Item = &GameRecord> {
        self.games.iter()
    }

    pub fn experiences(&self) -> impl Iterator<Item = &Experience> {
        self.games.iter().flat_map(|g| g.experiences.iter())
    }

    /// Removes every experience of the oldest `floor(fraction * G)` games.
    /// Returns how many games were removed.
    pub fn prune(&mut self, fraction_oldest_games: f64) -> usize {
        let count = ((fraction_oldest_games * self.games.len() as f64) + 1e-9).floor() as usize;
        let count = count.min(self.games.len());
        self.games.drain(..count);
        count
    }

    /// Compact little-endian encoding; two buffers with the same contents
    /// encode to the same bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(BUFFER_MAGIC);
        put_u64(&mut out, self.capacity_games as u64);
        put_u64(&mut out, self.games.len() as u64);
        for g in &self.games {
            put_u64(&mut out, g.game_id);
            put_u64(&mut out, g.experiences.len() as u64);
            for e in &g.experiences {
                put_u32(&mut out, e.ply);
                out.extend_from_slice(&e.example.value.to_le_bytes());
                put_u32(&mut out, e.example.state.size as u32);
                put_u64(&mut out, e.example.state.planes.len() as u64);
                for x in &e.example.state.planes {
                    out.extend_from_slice(&x.to_le_bytes());
                }
                put_u64(&mut out, e.example.policy.len() as u64);
                for x in &e.example.policy {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Cursor { bytes, pos: 0 };
        if r.take(8)? != BUFFER_MAGIC {
            return Err(Error::Config("not an experience buffer file".into()));
        }
        let capacity = r.u64()? as usize;
        let games = r.u64()?;
        let mut buffer = ExperienceBuffer::new(capacity);
        for _ in 0..games {
            let game_id = r.u64()?;
            let count = r.u64()?;
            let mut experiences = Vec::new();
            for _ in 0..count {
                let ply = r.u32()?;
                let value = r.f64()?;
                let size = r.u32()? as usize;
                let planes = (0..r.u64()?).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
                let policy = (0..r.u64()?).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
                experiences.push(Experience {
                    example: TrainingExample {
                        state: StateTensor { size, planes },
                        policy,
                        value,
                    },
                    game_id,
                    ply,
                });
            }
            buffer.games.push_back(GameRecord {
                game_id,
                experiences,
            });
        }
        if r.pos != bytes.len() {
            return Err(Error::Config("trailing bytes in experience buffer file".into()));
        }
        Ok(buffer)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)?.write_all(&self.to_bytes())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, x: u64) {
    out.extend_from_slice(&x.to_le_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Config("truncated experience buffer file".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.array().map(u64::from_le_bytes)
    }

    fn f32(&mut self) -> Result<f32> {
        self.array().map(f32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.array().map(f64::from_le_bytes)
    }
}
