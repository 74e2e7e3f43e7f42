namespace sst {}
