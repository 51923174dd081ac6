# Jordan Spectra
