//! Little-endian binary codec shared by the state checkpoints.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) struct Writer<W: Write> {
    inner: W,
}

impl<W: Write> Writer<W> {
    pub fn new(inner: W) -> Self {
        Writer { inner }
    }

    fn put(&mut self, bytes: &[u8]) -> Result<()> {
        self.inner.write_all(bytes).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.put(b)
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.put(&v.to_le_bytes())
    }

    pub fn c64s(&mut self, values: &[C64]) -> Result<()> {
        for v in values {
            self.f64(v.re)?;
            self.f64(v.im)?;
        }
        Ok(())
    }

    pub fn f64s(&mut self, values: &[f64]) -> Result<()> {
        self.u64(values.len() as u64)?;
        values.iter().try_for_each(|&v| self.f64(v))
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush().map_err(|e| Error::Checkpoint(e.to_string()))?;
        Ok(self.inner)
    }
}

pub(crate) struct Reader<R: Read> {
    inner: R,
}

impl<R: Read> Reader<R> {
    pub fn new(inner: R) -> Self {
        Reader { inner }
    }

    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        let mut buf = [0u8; K];
        self.inner.read_exact(&mut buf).map_err(|e| Error::Checkpoint(format!("truncated checkpoint: {e}")))?;
        Ok(buf)
    }

    pub fn expect(&mut self, tag: &[u8; 4]) -> Result<()> {
        let got = self.take::<4>()?;
        if &got != tag {
            return Err(Error::Checkpoint(format!("bad magic {:?}, expected {:?}", got, tag)));
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    pub fn c64s(&mut self, len: usize) -> Result<Vec<C64>> {
        (0..len).map(|_| Ok(C64::new(self.f64()?, self.f64()?))).collect()
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>> {
        let len = self.u64()? as usize;
        (0..len).map(|_| self.f64()).collect()
    }

    /// Fails unless the stream is exhausted.
    pub fn end(mut self) -> Result<()> {
        let mut extra = [0u8; 1];
        match self.inner.read(&mut extra) {
            Ok(0) => Ok(()),
            Ok(_) => Err(Error::Checkpoint("trailing bytes after checkpoint body".into())),
            Err(e) => Err(Error::Checkpoint(e.to_string())),
        }
    }
}
